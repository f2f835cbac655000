#include "liesym/expr.hpp"

#include "liesym/error.hpp"

#include <algorithm>
#include <cassert>
#include <random>
#include <sstream>

namespace liesym {

struct Node {
    Kind kind;
    std::size_t hash = 0;
    Rational num;
    std::string name;
    int order = 0;
    std::vector<Expr> args;
};

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
    return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::size_t hash_string(const std::string& s) {
    std::size_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::size_t hash_rational(const Rational& q) {
    std::size_t h = mpz_get_ui(q.get_num().get_mpz_t());
    h = mix(h, mpz_sgn(q.get_num().get_mpz_t()) + 2);
    h = mix(h, mpz_size(q.get_num().get_mpz_t()));
    h = mix(h, mpz_get_ui(q.get_den().get_mpz_t()));
    return h;
}

bool is_positive_integer(const Expr& e) {
    return e.is_number() && is_integer(e.value()) && e.value() > 0;
}

} // namespace

struct Build {
    static Expr make(Node n) {
        std::size_t h = static_cast<std::size_t>(n.kind) * 0x100000001b3ULL;
        h = mix(h, hash_rational(n.num));
        h = mix(h, hash_string(n.name));
        h = mix(h, static_cast<std::size_t>(n.order));
        for (const auto& a : n.args) h = mix(h, a.hash());
        n.hash = h;
        return Expr(std::make_shared<const Node>(std::move(n)));
    }
    static Expr number(const Rational& q) {
        Node n;
        n.kind = Kind::Number;
        n.num = q;
        n.num.canonicalize();
        return make(std::move(n));
    }
    static Expr symbol(const std::string& s) {
        Node n;
        n.kind = Kind::Symbol;
        n.name = s;
        n.num = 0;
        return make(std::move(n));
    }
    static Expr raw_pow(const Expr& b, const Expr& e) {
        Node n;
        n.kind = Kind::Pow;
        n.num = 0;
        n.args = {b, e};
        return make(std::move(n));
    }
    static Expr raw_func(const std::string& s, int order, const Expr& a) {
        Node n;
        n.kind = Kind::Func;
        n.name = s;
        n.order = order;
        n.num = 0;
        n.args = {a};
        return make(std::move(n));
    }
    // factors sorted and merged, coeff nonzero
    static Expr raw_mul(const Rational& c, std::vector<Expr> factors) {
        if (factors.empty()) return number(c);
        if (factors.size() == 1 && c == 1) return factors[0];
        Node n;
        n.kind = Kind::Mul;
        n.num = c;
        n.args = std::move(factors);
        return make(std::move(n));
    }
    static Expr raw_add(const Rational& c, std::vector<Expr> terms) {
        if (terms.empty()) return number(c);
        if (terms.size() == 1 && c == 0) return terms[0];
        Node n;
        n.kind = Kind::Add;
        n.num = c;
        n.args = std::move(terms);
        return make(std::move(n));
    }
};

namespace {

const Expr& zero_expr() {
    static const Expr z = Build::number(Rational(0));
    return z;
}
const Expr& one_expr() {
    static const Expr o = Build::number(Rational(1));
    return o;
}

} // namespace

Expr::Expr() : node_(zero_expr().node_) {}
Expr::Expr(int n) : Expr(Build::number(Rational(n))) {}
Expr::Expr(long n) : Expr(Build::number(Rational(n))) {}
Expr::Expr(const Rational& q) : Expr(Build::number(q)) {}

Expr Expr::symbol(const std::string& name) { return Build::symbol(name); }

Kind Expr::kind() const { return node_->kind; }
bool Expr::is_zero() const { return node_->kind == Kind::Number && node_->num == 0; }
bool Expr::is_one() const { return node_->kind == Kind::Number && node_->num == 1; }
bool Expr::is_func(const std::string& fname) const {
    return node_->kind == Kind::Func && node_->name == fname;
}
const Rational& Expr::value() const { return node_->num; }
const std::string& Expr::name() const { return node_->name; }
int Expr::order() const { return node_->order; }
const std::vector<Expr>& Expr::args() const { return node_->args; }
const Expr& Expr::base() const { return node_->args.at(0); }
const Expr& Expr::exponent() const { return node_->args.at(1); }
const Expr& Expr::arg() const { return node_->args.at(0); }
std::size_t Expr::hash() const { return node_->hash; }

// ---------------------------------------------------------------- ordering

namespace {

int cmp_rational(const Rational& a, const Rational& b) {
    int c = cmp(a, b);
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

int atom_rank(const Expr& e) {
    switch (e.kind()) {
    case Kind::Number: return 0;
    case Kind::Symbol: return 1;
    case Kind::Func: return 2;
    case Kind::Add: return 3;
    default: return 4;
    }
}

int compare_base(const Expr& a, const Expr& b);

int compare_factor(const Expr& fa, const Expr& fb) {
    const Expr& ba = fa.is_pow() ? fa.base() : fa;
    const Expr& bb = fb.is_pow() ? fb.base() : fb;
    int c = compare_base(ba, bb);
    if (c) return c;
    const Expr& ea = fa.is_pow() ? fa.exponent() : one_expr();
    const Expr& eb = fb.is_pow() ? fb.exponent() : one_expr();
    return compare(ea, eb);
}

int compare_base(const Expr& a, const Expr& b) {
    if (a.ptr() == b.ptr()) return 0;
    int ra = atom_rank(a), rb = atom_rank(b);
    if (ra != rb) return ra < rb ? -1 : 1;
    switch (a.kind()) {
    case Kind::Number: return cmp_rational(a.value(), b.value());
    case Kind::Symbol: {
        int c = a.name().compare(b.name());
        return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case Kind::Func: {
        int c = a.name().compare(b.name());
        if (c) return c < 0 ? -1 : 1;
        if (a.order() != b.order()) return a.order() < b.order() ? -1 : 1;
        return compare(a.arg(), b.arg());
    }
    default: return compare(a, b);
    }
}

int expr_class(const Expr& e) {
    if (e.is_number()) return 0;
    if (e.is_add()) return 2;
    return 1;
}

} // namespace

int compare(const Expr& a, const Expr& b) {
    if (a.ptr() == b.ptr()) return 0;
    int ca = expr_class(a), cb = expr_class(b);
    if (ca != cb) return ca < cb ? -1 : 1;
    if (ca == 0) return cmp_rational(a.value(), b.value());
    if (ca == 2) {
        const auto& ta = a.args();
        const auto& tb = b.args();
        std::size_t n = std::min(ta.size(), tb.size());
        for (std::size_t i = 0; i < n; ++i) {
            int c = compare(ta[i], tb[i]);
            if (c) return c;
        }
        if (ta.size() != tb.size()) return ta.size() < tb.size() ? -1 : 1;
        return cmp_rational(a.value(), b.value());
    }
    // monomial-like: compare factor lists, then coefficient
    const std::vector<Expr>* fa;
    const std::vector<Expr>* fb;
    std::vector<Expr> sa, sb;
    if (a.is_mul()) fa = &a.args(); else { sa = {a}; fa = &sa; }
    if (b.is_mul()) fb = &b.args(); else { sb = {b}; fb = &sb; }
    std::size_t n = std::min(fa->size(), fb->size());
    for (std::size_t i = 0; i < n; ++i) {
        int c = compare_factor((*fa)[i], (*fb)[i]);
        if (c) return c;
    }
    if (fa->size() != fb->size()) return fa->size() < fb->size() ? -1 : 1;
    const Rational ka = a.is_mul() ? a.value() : Rational(1);
    const Rational kb = b.is_mul() ? b.value() : Rational(1);
    return cmp_rational(ka, kb);
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.ptr() == b.ptr()) return true;
    if (a.hash() != b.hash()) return false;
    return compare(a, b) == 0;
}

// ---------------------------------------------------------------- helpers

std::pair<Rational, Expr> split_coeff(const Expr& term) {
    if (term.is_number()) return {term.value(), one_expr()};
    if (term.is_mul()) {
        if (term.value() == 1) return {Rational(1), term};
        return {term.value(), Build::raw_mul(Rational(1), term.args())};
    }
    return {Rational(1), term};
}

std::pair<Expr, Expr> split_pow(const Expr& factor) {
    if (factor.is_pow()) return {factor.base(), factor.exponent()};
    return {factor, one_expr()};
}

std::vector<Expr> terms_of(const Expr& e) {
    if (!e.is_add()) return {e};
    std::vector<Expr> out;
    if (e.value() != 0) out.push_back(Build::number(e.value()));
    out.insert(out.end(), e.args().begin(), e.args().end());
    return out;
}

std::vector<Expr> factors_of(const Expr& e) {
    if (!e.is_mul()) return {e};
    std::vector<Expr> out;
    if (e.value() != 1) out.push_back(Build::number(e.value()));
    out.insert(out.end(), e.args().begin(), e.args().end());
    return out;
}

// ---------------------------------------------------------------- add

Expr add(const std::vector<Expr>& input) {
    Rational constant = 0;
    std::map<Expr, Rational, ExprLess> acc;
    std::vector<const Expr*> stack;
    for (auto it = input.rbegin(); it != input.rend(); ++it) stack.push_back(&*it);
    while (!stack.empty()) {
        const Expr& x = *stack.back();
        stack.pop_back();
        if (x.is_number()) {
            constant += x.value();
        } else if (x.is_add()) {
            constant += x.value();
            for (const auto& t : x.args()) {
                auto [k, key] = split_coeff(t);
                acc[key] += k;
            }
        } else {
            auto [k, key] = split_coeff(x);
            acc[key] += k;
        }
    }
    std::vector<Expr> terms;
    terms.reserve(acc.size());
    for (auto& [key, k] : acc) {
        if (k == 0) continue;
        if (k == 1) {
            terms.push_back(key);
        } else if (key.is_mul()) {
            terms.push_back(Build::raw_mul(k, key.args()));
        } else {
            terms.push_back(Build::raw_mul(k, {key}));
        }
    }
    return Build::raw_add(constant, std::move(terms));
}

// ---------------------------------------------------------------- pow

namespace {

// q^r for rational q>0 and non-integer rational r via prime factorization;
// the fractional part of every prime exponent is kept in [0,1).
Expr numeric_power(const Rational& q, const Rational& r) {
    if (q < 0) {
        if (r.get_den() % 2 == 0) return Build::raw_pow(Build::number(q), Build::number(r));
        Expr mag = numeric_power(-q, r);
        bool odd = r.get_num() % 2 != 0;
        return odd ? mul({Build::number(Rational(-1)), mag}) : mag;
    }
    std::map<Integer, long> fn, fd;
    if (!try_factorize(q.get_num(), fn) || !try_factorize(q.get_den(), fd))
        return Build::raw_pow(Build::number(q), Build::number(r));
    std::map<Integer, long> v = fn;
    for (auto& [p, k] : fd) v[p] -= k;
    Rational coeff = 1;
    std::vector<Expr> factors;
    for (auto& [p, k] : v) {
        if (k == 0) continue;
        Rational total = Rational(k) * r;
        Integer fl;
        mpz_fdiv_q(fl.get_mpz_t(), total.get_num().get_mpz_t(), total.get_den().get_mpz_t());
        Rational frac = total - Rational(fl);
        coeff *= rational_pow(Rational(p), fl.get_si());
        if (frac != 0) factors.push_back(Build::raw_pow(Build::number(Rational(p)), Build::number(frac)));
    }
    std::sort(factors.begin(), factors.end(),
              [](const Expr& a, const Expr& b) { return compare_factor(a, b) < 0; });
    return Build::raw_mul(coeff, std::move(factors));
}

} // namespace

Expr pow(const Expr& b, const Expr& e) {
    if (e.is_number()) {
        if (e.value() == 0) return one_expr();
        if (e.value() == 1) return b;
    }
    if (b.is_number()) {
        const Rational& q = b.value();
        if (q == 1) return one_expr();
        if (e.is_number()) {
            const Rational& r = e.value();
            if (q == 0) {
                if (r < 0) throw Error(ErrorKind::Domain, "division by zero");
                return zero_expr();
            }
            if (is_integer(r)) {
                if (abs(r) > 100000) throw Error(ErrorKind::Domain, "exponent too large");
                return Build::number(rational_pow(q, r.get_num().get_si()));
            }
            return numeric_power(q, r);
        }
        if (q == 0) return zero_expr();
        return Build::raw_pow(b, e);
    }
    if (b.is_pow()) return pow(b.base(), mul({b.exponent(), e}));
    if (b.is_mul()) {
        bool integral = e.is_number() && is_integer(e.value());
        if (b.value() < 0 && !integral) {
            // split off -1 only for odd-denominator rational exponents
            if (e.is_number() && e.value().get_den() % 2 == 1) {
                std::vector<Expr> fs{pow(Build::number(-b.value()), e), pow(Build::number(Rational(-1)), e)};
                for (const auto& f : b.args()) fs.push_back(pow(f, e));
                return mul(fs);
            }
            return Build::raw_pow(b, e);
        }
        std::vector<Expr> fs;
        fs.push_back(pow(Build::number(b.value()), e));
        for (const auto& f : b.args()) fs.push_back(pow(f, e));
        return mul(fs);
    }
    if (b.is_func("exp")) return exp(mul({b.arg(), e}));
    return Build::raw_pow(b, e);
}

// ---------------------------------------------------------------- mul

namespace {

Expr mul_impl(const std::vector<Expr>& input, int depth) {
    Rational c = 1;
    std::map<Expr, std::vector<Expr>, decltype([](const Expr& a, const Expr& b) {
                 return compare_base(a, b) < 0;
             })>
        powers;
    std::vector<Expr> exp_args;
    std::vector<Expr> stack(input.rbegin(), input.rend());
    while (!stack.empty()) {
        Expr x = stack.back();
        stack.pop_back();
        if (x.is_number()) {
            c *= x.value();
            if (c == 0) return zero_expr();
            continue;
        }
        if (x.is_mul()) {
            c *= x.value();
            for (auto it = x.args().rbegin(); it != x.args().rend(); ++it) stack.push_back(*it);
            continue;
        }
        if (x.is_func("exp")) {
            exp_args.push_back(x.arg());
            continue;
        }
        auto [b, e] = split_pow(x);
        powers[b].push_back(e);
    }
    std::vector<Expr> factors;
    std::vector<Expr> refeed;
    for (auto& [b, es] : powers) {
        Expr ex = es.size() == 1 ? es[0] : add(es);
        if (ex.is_zero()) continue;
        if (es.size() == 1) {
            // untouched factor: rebuild without re-canonicalizing
            factors.push_back(ex.is_one() ? b : Build::raw_pow(b, ex));
            continue;
        }
        Expr f = pow(b, ex);
        if (f.is_number()) {
            c *= f.value();
            if (c == 0) return zero_expr();
        } else if (f.is_mul() || f.is_func("exp")) {
            refeed.push_back(f);
        } else {
            factors.push_back(f);
        }
    }
    if (!exp_args.empty()) {
        Expr a = exp_args.size() == 1 ? exp_args[0] : add(exp_args);
        Expr f = exp(a);
        if (f.is_number()) c *= f.value();
        else if (f.is_func("exp")) factors.push_back(f);
        else refeed.push_back(f);
    }
    if (!refeed.empty() && depth < 8) {
        std::vector<Expr> all = factors;
        all.push_back(Build::number(c));
        all.insert(all.end(), refeed.begin(), refeed.end());
        return mul_impl(all, depth + 1);
    }
    for (auto& f : refeed) factors.push_back(f);
    if (c == 0) return zero_expr();
    std::sort(factors.begin(), factors.end(),
              [](const Expr& a, const Expr& b) { return compare_factor(a, b) < 0; });
    // a number times a single sum distributes
    if (factors.size() == 1 && factors[0].is_add() && c != 1) {
        std::vector<Expr> ts;
        const Expr& s = factors[0];
        if (s.value() != 0) ts.push_back(Build::number(c * s.value()));
        for (const auto& t : s.args()) {
            auto [k, key] = split_coeff(t);
            Rational kk = k * c;
            ts.push_back(key.is_mul() ? Build::raw_mul(kk, key.args()) : Build::raw_mul(kk, {key}));
        }
        return add(ts);
    }
    return Build::raw_mul(c, std::move(factors));
}

} // namespace

Expr mul(const std::vector<Expr>& factors) { return mul_impl(factors, 0); }

// ---------------------------------------------------------------- functions

Expr exp(const Expr& a) {
    if (a.is_zero()) return one_expr();
    if (a.is_func("log")) return a.arg();
    return Build::raw_func("exp", 0, a);
}

Expr log(const Expr& a) {
    if (a.is_one()) return zero_expr();
    if (a.is_func("exp")) return a.arg();
    if (a.is_number() && a.value() <= 0) throw Error(ErrorKind::Domain, "log of non-positive number");
    return Build::raw_func("log", 0, a);
}

Expr func(const std::string& name, int order, const Expr& arg) {
    if (name == "exp" && order == 0) return exp(arg);
    if (name == "log" && order == 0) return log(arg);
    return Build::raw_func(name, order, arg);
}

Expr operator+(const Expr& a, const Expr& b) { return add({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return add({a, mul({Expr(-1), b})}); }
Expr operator-(const Expr& a) { return mul({Expr(-1), a}); }
Expr operator*(const Expr& a, const Expr& b) { return mul({a, b}); }
Expr operator/(const Expr& a, const Expr& b) {
    if (b.is_zero()) throw Error(ErrorKind::Domain, "division by zero");
    return mul({a, pow(b, Expr(-1))});
}
Expr& operator+=(Expr& a, const Expr& b) { return a = a + b; }
Expr& operator-=(Expr& a, const Expr& b) { return a = a - b; }
Expr& operator*=(Expr& a, const Expr& b) { return a = a * b; }

// ---------------------------------------------------------------- render

namespace {

bool renders_atomic(const Expr& e) {
    if (e.is_symbol() || e.is_func()) return true;
    if (e.is_number()) return is_integer(e.value()) && e.value() >= 0;
    return false;
}

std::string render_factor(const Expr& f);

std::string render_monomial(const Rational& c, const std::vector<Expr>& factors) {
    // c != 0; returns with sign handled by caller when c < 0 uses "-"
    std::string out;
    Rational a = abs(c);
    bool first = true;
    if (a != 1 || factors.empty()) {
        out += render(a);
        first = false;
    }
    for (const auto& f : factors) {
        if (!first) out += "*";
        out += render_factor(f);
        first = false;
    }
    return out;
}

std::string render_factor(const Expr& f) {
    if (f.is_add()) return "(" + render(f) + ")";
    if (f.is_mul()) return "(" + render(f) + ")";
    if (f.is_number() && !(is_integer(f.value()) && f.value() >= 0)) return "(" + render(f) + ")";
    return render(f);
}

} // namespace

std::string render(const Expr& e) {
    switch (e.kind()) {
    case Kind::Number: return render(e.value());
    case Kind::Symbol: return e.name();
    case Kind::Func: {
        std::string n = e.name();
        for (int i = 0; i < e.order(); ++i) n += "'";
        return n + "(" + render(e.arg()) + ")";
    }
    case Kind::Pow: {
        const Expr& b = e.base();
        const Expr& x = e.exponent();
        std::string bs = renders_atomic(b) ? render(b) : "(" + render(b) + ")";
        std::string xs = renders_atomic(x) ? render(x) : "(" + render(x) + ")";
        return bs + "^" + xs;
    }
    case Kind::Mul: {
        std::string body = render_monomial(e.value(), e.args());
        return e.value() < 0 ? "-" + body : body;
    }
    case Kind::Add: {
        std::string out;
        bool first = true;
        auto emit = [&](const Rational& c, const std::vector<Expr>& fs) {
            std::string body = render_monomial(c, fs);
            if (first) out += (c < 0 ? "-" : "") + body;
            else out += (c < 0 ? " - " : " + ") + body;
            first = false;
        };
        if (e.value() != 0) emit(e.value(), {});
        for (const auto& t : e.args()) {
            auto [k, key] = split_coeff(t);
            if (key.is_mul()) emit(k, key.args());
            else emit(k, {key});
        }
        return out;
    }
    }
    return "?";
}

// ---------------------------------------------------------------- expand

namespace {

bool has_unexpanded_sum(const Expr& term) {
    if (term.is_add()) return true;
    if (term.is_pow()) return term.base().is_add() && is_positive_integer(term.exponent());
    if (term.is_mul()) {
        for (const auto& f : term.args())
            if (has_unexpanded_sum(f)) return true;
    }
    return false;
}

Expr expand_product(const std::vector<Expr>& factors, int depth);

Expr finish(const Expr& e, int depth) {
    if (depth > 12) return e;
    if (e.is_add()) {
        bool clean = true;
        for (const auto& t : e.args())
            if (has_unexpanded_sum(t)) { clean = false; break; }
        if (clean) return e;
        std::vector<Expr> out;
        if (e.value() != 0) out.push_back(Build::number(e.value()));
        for (const auto& t : e.args())
            out.push_back(has_unexpanded_sum(t) ? expand_product(factors_of(t), depth + 1) : t);
        return add(out);
    }
    if (has_unexpanded_sum(e)) return expand_product(factors_of(e), depth + 1);
    return e;
}

Expr expand_power(const Expr& sum, long n, int depth) {
    Expr acc = one_expr();
    Expr base = sum;
    while (n > 0) {
        if (n & 1) acc = expand_product({acc, base}, depth);
        n >>= 1;
        if (n) base = expand_product({base, base}, depth);
    }
    return acc;
}

Expr expand_product(const std::vector<Expr>& factors, int depth) {
    std::vector<Expr> plain;
    std::vector<Expr> sums;
    for (const auto& f : factors) {
        if (f.is_add()) {
            sums.push_back(f);
        } else if (f.is_pow() && f.base().is_add() && is_positive_integer(f.exponent())) {
            long n = f.exponent().value().get_num().get_si();
            Expr s = expand_power(f.base(), n, depth);
            if (s.is_add()) sums.push_back(s);
            else plain.push_back(s);
        } else {
            plain.push_back(f);
        }
    }
    Expr head = mul(plain);
    std::vector<Expr> acc = terms_of(head);
    for (const auto& s : sums) {
        std::vector<Expr> st = terms_of(s);
        std::vector<Expr> next;
        next.reserve(acc.size() * st.size());
        for (const auto& a : acc)
            for (const auto& b : st) next.push_back(mul({a, b}));
        acc = terms_of(add(next));
    }
    return finish(add(acc), depth);
}

} // namespace

Expr expand(const Expr& e) {
    switch (e.kind()) {
    case Kind::Number:
    case Kind::Symbol: return e;
    case Kind::Func: return func(e.name(), e.order(), expand(e.arg()));
    case Kind::Pow: {
        Expr b = expand(e.base());
        Expr x = expand(e.exponent());
        if (b.is_add() && is_positive_integer(x)) {
            if (x.value() > 64) throw Error(ErrorKind::Domain, "expansion exponent too large");
            return expand_power(b, x.value().get_num().get_si(), 0);
        }
        return finish(pow(b, x), 0);
    }
    case Kind::Mul: {
        std::vector<Expr> fs;
        fs.push_back(Build::number(e.value()));
        for (const auto& f : e.args()) fs.push_back(expand(f));
        return expand_product(fs, 0);
    }
    case Kind::Add: {
        std::vector<Expr> ts;
        ts.push_back(Build::number(e.value()));
        for (const auto& t : e.args()) ts.push_back(expand(t));
        return finish(add(ts), 0);
    }
    }
    return e;
}

// ---------------------------------------------------------------- symbols

namespace {

void collect_symbols(const Expr& e, std::set<std::string>& out) {
    if (e.is_symbol()) {
        out.insert(e.name());
        return;
    }
    for (const auto& a : e.args()) collect_symbols(a, out);
}

} // namespace

std::set<std::string> free_symbols(const Expr& e) {
    std::set<std::string> out;
    collect_symbols(e, out);
    return out;
}

bool depends_on(const Expr& e, const std::string& sym) {
    if (e.is_symbol()) return e.name() == sym;
    for (const auto& a : e.args())
        if (depends_on(a, sym)) return true;
    return false;
}

bool depends_on_any(const Expr& e, const std::set<std::string>& syms) {
    if (e.is_symbol()) return syms.count(e.name()) > 0;
    for (const auto& a : e.args())
        if (depends_on_any(a, syms)) return true;
    return false;
}

// ---------------------------------------------------------------- calculus

Expr differentiate(const Expr& e, const std::string& s) {
    if (!depends_on(e, s)) return zero_expr();
    switch (e.kind()) {
    case Kind::Number: return zero_expr();
    case Kind::Symbol: return e.name() == s ? one_expr() : zero_expr();
    case Kind::Add: {
        std::vector<Expr> ts;
        for (const auto& t : e.args()) ts.push_back(differentiate(t, s));
        return add(ts);
    }
    case Kind::Mul: {
        std::vector<Expr> ts;
        const auto& fs = e.args();
        for (std::size_t i = 0; i < fs.size(); ++i) {
            Expr d = differentiate(fs[i], s);
            if (d.is_zero()) continue;
            std::vector<Expr> prod;
            prod.push_back(Build::number(e.value()));
            for (std::size_t j = 0; j < fs.size(); ++j)
                if (j != i) prod.push_back(fs[j]);
            prod.push_back(d);
            ts.push_back(mul(prod));
        }
        return add(ts);
    }
    case Kind::Pow: {
        const Expr& b = e.base();
        const Expr& x = e.exponent();
        if (!depends_on(x, s)) {
            return mul({x, pow(b, add({x, Expr(-1)})), differentiate(b, s)});
        }
        Expr db = differentiate(b, s);
        Expr dx = differentiate(x, s);
        return mul({e, add({mul({dx, log(b)}), mul({x, db, pow(b, Expr(-1))})})});
    }
    case Kind::Func: {
        Expr da = differentiate(e.arg(), s);
        if (e.name() == "exp" && e.order() == 0) return mul({e, da});
        if (e.name() == "log" && e.order() == 0) return mul({da, pow(e.arg(), Expr(-1))});
        return mul({func(e.name(), e.order() + 1, e.arg()), da});
    }
    }
    return zero_expr();
}

Expr differentiate(const Expr& e, const std::string& sym, int order) {
    Expr r = e;
    for (int i = 0; i < order; ++i) r = differentiate(r, sym);
    return r;
}

Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings) {
    if (bindings.empty()) return e;
    switch (e.kind()) {
    case Kind::Number: return e;
    case Kind::Symbol: {
        auto it = bindings.find(e.name());
        return it == bindings.end() ? e : it->second;
    }
    case Kind::Func: return func(e.name(), e.order(), substitute(e.arg(), bindings));
    case Kind::Pow: return pow(substitute(e.base(), bindings), substitute(e.exponent(), bindings));
    case Kind::Mul: {
        std::vector<Expr> fs{Build::number(e.value())};
        for (const auto& f : e.args()) fs.push_back(substitute(f, bindings));
        return mul(fs);
    }
    case Kind::Add: {
        std::vector<Expr> ts{Build::number(e.value())};
        for (const auto& t : e.args()) ts.push_back(substitute(t, bindings));
        return add(ts);
    }
    }
    return e;
}

// ---------------------------------------------------------------- evaluation

std::optional<Rational> evaluate(const Expr& e, const EvalContext& ctx) {
    switch (e.kind()) {
    case Kind::Number: return e.value();
    case Kind::Symbol: return ctx.symbol ? ctx.symbol(e.name()) : std::nullopt;
    case Kind::Add: {
        Rational s = e.value();
        for (const auto& t : e.args()) {
            auto v = evaluate(t, ctx);
            if (!v) return std::nullopt;
            s += *v;
        }
        return s;
    }
    case Kind::Mul: {
        Rational p = e.value();
        for (const auto& f : e.args()) {
            auto v = evaluate(f, ctx);
            if (!v) return std::nullopt;
            p *= *v;
        }
        return p;
    }
    case Kind::Pow: {
        auto b = evaluate(e.base(), ctx);
        if (!b) return std::nullopt;
        auto x = evaluate(e.exponent(), ctx);
        if (!x) return std::nullopt;
        if (*b == 0) {
            if (*x > 0) return Rational(0);
            return std::nullopt;
        }
        if (abs(x->get_num()) > 4096) return std::nullopt;
        Rational br = *b;
        if (!is_integer(*x)) {
            auto root = rational_root(br, x->get_den().get_ui());
            if (!root) return std::nullopt;
            br = *root;
        }
        return rational_pow(br, x->get_num().get_si());
    }
    case Kind::Func: {
        auto a = evaluate(e.arg(), ctx);
        if (!a) return std::nullopt;
        if (e.name() == "exp" && e.order() == 0) {
            if (*a == 0) return Rational(1);
            return std::nullopt;
        }
        if (e.name() == "log" && e.order() == 0) {
            if (*a == 1) return Rational(0);
            return std::nullopt;
        }
        return ctx.opaque ? ctx.opaque(e.name(), e.order(), *a) : std::nullopt;
    }
    }
    return std::nullopt;
}

std::optional<Rational> evaluate(const Expr& e, const std::map<std::string, Rational>& point) {
    EvalContext ctx;
    ctx.symbol = [&](const std::string& s) -> std::optional<Rational> {
        auto it = point.find(s);
        if (it == point.end()) return std::nullopt;
        return it->second;
    };
    return evaluate(e, ctx);
}

// ---------------------------------------------------------------- zero test

const char* to_string(ZeroVerdict v) {
    switch (v) {
    case ZeroVerdict::Zero: return "Zero";
    case ZeroVerdict::NonZero: return "NonZero";
    case ZeroVerdict::Undecided: return "Undecided";
    }
    return "?";
}

Integer exponent_denominator_lcm(const Expr& e) {
    Integer d = 1;
    if (e.is_pow() && e.exponent().is_number()) d = e.exponent().value().get_den();
    for (const auto& a : e.args()) d = lcm(d, exponent_denominator_lcm(a));
    return d;
}

namespace {

// multiply through by sums raised to negative integer powers
Expr clear_denominators(const Expr& e) {
    std::map<Expr, long, ExprLess> dens;
    for (const auto& t : terms_of(e)) {
        for (const auto& f : factors_of(t)) {
            if (f.is_pow() && f.base().is_add() && f.exponent().is_number() &&
                is_integer(f.exponent().value()) && f.exponent().value() < 0) {
                long k = -f.exponent().value().get_num().get_si();
                long& cur = dens[f.base()];
                cur = std::max(cur, k);
            }
        }
    }
    if (dens.empty()) return e;
    // multiply term by term so that the powers merge before distribution
    std::vector<Expr> out;
    for (const auto& t : terms_of(e)) {
        std::vector<Expr> fs{t};
        for (auto& [b, k] : dens) fs.push_back(pow(b, Build::number(Rational(k))));
        out.push_back(expand(mul(fs)));
    }
    return expand(add(out));
}

bool is_variable(const std::string& s, const ZeroTestOptions& o) {
    if (o.variables.count(s)) return true;
    return o.jet_names_are_variables && s.size() > 2 && s[0] == 'u' && s[1] == '_';
}

bool exp_args_are_numeric_affine(const Expr& e, const ZeroTestOptions& o) {
    if (e.is_func("exp")) {
        for (const auto& s : free_symbols(e.arg()))
            if (!is_variable(s, o)) return false;
        for (const auto& t : terms_of(expand(e.arg())))
            for (const auto& f : factors_of(t))
                if (!(f.is_number() || f.is_symbol())) return false;
        for (const auto& t : terms_of(expand(e.arg()))) {
            int syms = 0;
            for (const auto& f : factors_of(t))
                if (f.is_symbol()) ++syms;
            if (syms > 1) return false;
        }
    }
    for (const auto& a : e.args())
        if (!exp_args_are_numeric_affine(a, o)) return false;
    return true;
}

ZeroVerdict sample_test(const Expr& e, const ZeroTestOptions& opts) {
    std::set<std::string> syms = free_symbols(e);
    std::vector<std::string> params, vars;
    for (const auto& s : syms) (is_variable(s, opts) ? vars : params).push_back(s);
    std::mt19937_64 rng(opts.seed ^ e.hash());
    int successes = 0;
    for (int attempt = 0; attempt < opts.points * 4 && successes < opts.points; ++attempt) {
        std::map<std::string, Expr> pb;
        for (const auto& p : params) {
            long v = std::uniform_int_distribution<long>(2, 97)(rng);
            pb[p] = Expr(v);
        }
        Expr inst = params.empty() ? e : expand(substitute(e, pb));
        if (inst.is_zero()) {
            ++successes;
            continue;
        }
        Integer d = exponent_denominator_lcm(inst);
        if (d > 12) d = 1;
        std::map<std::string, Rational> point;
        static const long dens[] = {1, 3, 5, 7, 9};
        for (const auto& v : vars) {
            long a = 0;
            while (a == 0) a = std::uniform_int_distribution<long>(-9, 9)(rng);
            long b = dens[std::uniform_int_distribution<int>(0, 4)(rng)];
            Rational r(a, b);
            r.canonicalize();
            point[v] = rational_pow(r, d.get_si());
        }
        std::map<std::tuple<std::string, int, std::string>, Rational> opaque_vals;
        EvalContext ctx;
        ctx.symbol = [&](const std::string& s) -> std::optional<Rational> {
            auto it = point.find(s);
            if (it == point.end()) return std::nullopt;
            return it->second;
        };
        ctx.opaque = [&](const std::string& n, int ord, const Rational& a) -> std::optional<Rational> {
            auto key = std::make_tuple(n, ord, render(a));
            auto it = opaque_vals.find(key);
            if (it != opaque_vals.end()) return it->second;
            long num = std::uniform_int_distribution<long>(-30, 30)(rng);
            long den = dens[std::uniform_int_distribution<int>(0, 4)(rng)];
            Rational r(num, den);
            r.canonicalize();
            opaque_vals[key] = r;
            return r;
        };
        auto v = evaluate(inst, ctx);
        if (!v) continue;
        ++successes;
        if (*v != 0) return ZeroVerdict::NonZero;
    }
    return ZeroVerdict::Undecided;
}

} // namespace

ZeroVerdict is_zero(const Expr& input, const ZeroTestOptions& opts) {
    if (input.is_zero()) return ZeroVerdict::Zero;
    Expr e = expand(input);
    if (e.is_zero()) return ZeroVerdict::Zero;
    Expr cleared = clear_denominators(e);
    if (cleared.is_zero()) return ZeroVerdict::Zero;
    ZeroVerdict v = sample_test(cleared, opts);
    if (v != ZeroVerdict::Undecided) return v;
    // distinct exponentials of numeric affine arguments are linearly
    // independent over the remaining factors; test each group separately
    if (exp_args_are_numeric_affine(cleared, opts)) {
        std::map<Expr, std::vector<Expr>, ExprLess> groups;
        for (const auto& t : terms_of(cleared)) {
            Expr key = one_expr();
            std::vector<Expr> rest;
            for (const auto& f : factors_of(t)) {
                if (f.is_func("exp")) key = f;
                else rest.push_back(f);
            }
            groups[key].push_back(mul(rest));
        }
        if (groups.size() > 1 || !groups.begin()->first.is_one()) {
            for (auto& [k, ts] : groups)
                if (is_zero(add(ts), opts) == ZeroVerdict::NonZero) return ZeroVerdict::NonZero;
        }
    }
    return ZeroVerdict::Undecided;
}

} // namespace liesym
