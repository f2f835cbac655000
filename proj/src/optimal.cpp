#include "liesym/optimal.hpp"

#include "liesym/algebra_catalog.hpp"
#include "liesym/error.hpp"
#include "liesym/parser.hpp"
#include "liesym/poly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <numbers>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

namespace liesym {

// ---------------------------------------------------------------- params

bool ParamSpec::admits(double v) const {
    switch (kind) {
    case ParamKind::Real: return true;
    case ParamKind::NonZero: return v != 0;
    case ParamKind::Positive: return v > 0;
    case ParamKind::NonNegative: return v >= 0;
    case ParamKind::Set:
        for (const auto& q : values)
            if (q.get_d() == v) return true;
        return false;
    case ParamKind::Interval: return v >= lower && v < upper;
    }
    return false;
}

std::string ParamSpec::render() const {
    switch (kind) {
    case ParamKind::Real: return name + " in R";
    case ParamKind::NonZero: return name + " != 0";
    case ParamKind::Positive: return name + " > 0";
    case ParamKind::NonNegative: return name + " >= 0";
    case ParamKind::Set: {
        std::string s = name + " in {";
        for (std::size_t i = 0; i < values.size(); ++i) s += (i ? "," : "") + liesym::render(values[i]);
        return s + "}";
    }
    case ParamKind::Interval: {
        std::ostringstream o;
        o << liesym::render(rational_approx(lower, 1000)) << " <= " << name << " < " << upper_text;
        return o.str();
    }
    }
    return name;
}

std::vector<Rational> SubalgebraRep::vector() const {
    if (!concrete()) throw Error(ErrorKind::Domain, "subalgebra family has free parameters");
    std::vector<Rational> v;
    for (const auto& c : coeffs) {
        Expr e = expand(c);
        if (!e.is_number()) throw Error(ErrorKind::Domain, "non-numeric coefficient " + liesym::render(e));
        v.push_back(e.value());
    }
    return v;
}

std::string SubalgebraRep::render(const std::string& prefix) const {
    std::string out;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        Expr c = expand(coeffs[i]);
        if (c.is_zero()) continue;
        std::string name = prefix + std::to_string(i + 1), term;
        if (c.is_one()) term = name;
        else if (c == Expr(-1)) term = "-" + name;
        else if (c.is_add()) term = "(" + liesym::render(c) + ")*" + name;
        else term = liesym::render(c) + "*" + name;
        if (out.empty()) out = term;
        else if (term[0] == '-') out += " - " + term.substr(1);
        else out += " + " + term;
    }
    if (out.empty()) out = "0";
    if (!params.empty()) {
        out += " | ";
        for (std::size_t i = 0; i < params.size(); ++i) out += (i ? "; " : "") + params[i].render();
    }
    return out;
}

SubalgebraRep make_rep(const std::vector<Rational>& v) {
    SubalgebraRep r;
    for (const auto& x : v) r.coeffs.push_back(Expr(x));
    return r;
}

namespace {

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

ParamSpec parse_constraint(const std::string& text, const std::string& where) {
    static const std::regex in_r(R"(^([A-Za-z_]\w*)\s+in\s+R$)");
    static const std::regex in_set(R"(^([A-Za-z_]\w*)\s+in\s+\{([^}]*)\}$)");
    static const std::regex cmp(R"(^([A-Za-z_]\w*)\s*(!=|>=|>)\s*0$)");
    static const std::regex arb(R"(^([A-Za-z_]\w*)\s+arbitrary(\s+nonzero)?$)");
    std::smatch m;
    std::string s = trim(text);
    if (std::regex_match(s, m, in_r)) return {m[1], ParamKind::Real};
    if (std::regex_match(s, m, arb)) return {m[1], m[2].matched ? ParamKind::NonZero : ParamKind::Real};
    if (std::regex_match(s, m, cmp)) {
        ParamKind k = m[2] == "!=" ? ParamKind::NonZero : m[2] == ">" ? ParamKind::Positive : ParamKind::NonNegative;
        return {m[1], k};
    }
    if (std::regex_match(s, m, in_set)) {
        ParamSpec p{m[1], ParamKind::Set};
        std::stringstream in(m[2].str());
        std::string item;
        while (std::getline(in, item, ',')) {
            try {
                p.values.push_back(parse_rational(trim(item)));
            } catch (const Error&) {
                throw Error(ErrorKind::Schema, where + ": bad value '" + trim(item) + "' in '" + s + "'");
            }
        }
        if (p.values.empty()) throw Error(ErrorKind::Schema, where + ": empty value set in '" + s + "'");
        return p;
    }
    throw Error(ErrorKind::Schema, where + ": cannot read constraint '" + s + "'");
}

} // namespace

std::vector<SubalgebraRep> parse_candidates(const std::string& text, std::size_t dim, const std::string& prefix) {
    std::vector<SubalgebraRep> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    static const std::regex ident(R"([A-Za-z_]\w*)");
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        std::string where = "line " + std::to_string(lineno);
        auto bar = line.find('|');
        std::string expr_text = trim(line.substr(0, bar));
        SubalgebraRep rep;
        if (bar != std::string::npos) {
            std::stringstream cs(line.substr(bar + 1));
            std::string item;
            while (std::getline(cs, item, ';'))
                if (!trim(item).empty()) rep.params.push_back(parse_constraint(item, where));
        }
        SymbolTable table;
        std::set<std::string> basis;
        for (std::size_t i = 1; i <= dim; ++i) {
            basis.insert(prefix + std::to_string(i));
            table.declare_variable(prefix + std::to_string(i));
        }
        std::set<std::string> named;
        for (const auto& p : rep.params) {
            if (!named.insert(p.name).second) throw Error(ErrorKind::Schema, where + ": parameter " + p.name + " constrained twice");
            table.declare_parameter(p.name);
        }
        for (auto it = std::sregex_iterator(expr_text.begin(), expr_text.end(), ident); it != std::sregex_iterator(); ++it) {
            std::string id = it->str();
            if (basis.count(id) || named.count(id)) continue;
            if (id.rfind(prefix, 0) == 0) throw Error(ErrorKind::Schema, where + ": " + id + " is not a basis element");
            named.insert(id);
            rep.params.push_back({id, ParamKind::Real});
            table.declare_parameter(id);
        }
        Expr e;
        try {
            e = parse(expr_text, table);
        } catch (const Error& err) {
            throw Error(ErrorKind::Schema, where + ": " + err.what());
        }
        std::vector<Expr> terms;
        for (std::size_t i = 1; i <= dim; ++i) {
            Expr c = expand(differentiate(e, prefix + std::to_string(i)));
            if (depends_on_any(c, basis)) throw Error(ErrorKind::Schema, where + ": not linear in the basis");
            rep.coeffs.push_back(c);
            terms.push_back(c * Expr::symbol(prefix + std::to_string(i)));
        }
        if (!expand(e - add(terms)).is_zero()) throw Error(ErrorKind::Schema, where + ": constant term outside the span");
        out.push_back(rep);
    }
    return out;
}

// ---------------------------------------------------------------- helpers

namespace {

constexpr double kTol = 1e-9;
constexpr double kZero = 1e-12;

template <class T>
struct Num;

template <>
struct Num<Rational> {
    static bool zero(const Rational& x) { return x == 0; }
    static int sign(const Rational& x) { return sgn(x); }
    static double d(const Rational& x) { return x.get_d(); }
    static ParamValue param(const Rational& x) { return {x.get_d(), x}; }
    static WordStep step(std::size_t g, const Rational& x) { return {g, true, x, x.get_d()}; }
    static std::optional<Rational> root(const Rational& x, unsigned long k) { return rational_root(x, k); }
    static Rational from(const Rational& x) { return x; }
};

template <>
struct Num<double> {
    static bool zero(double x) { return std::fabs(x) <= kZero; }
    static int sign(double x) { return x > 0 ? 1 : x < 0 ? -1 : 0; }
    static double d(double x) { return x; }
    static ParamValue param(double x) { return {x, std::nullopt}; }
    static WordStep step(std::size_t g, double x) { return {g, false, Rational(0), x}; }
    static std::optional<double> root(double, unsigned long) { return std::nullopt; }
    static double from(const Rational& x) { return x.get_d(); }
};

WordStep dstep(std::size_t g, double v) { return {g, false, Rational(0), v}; }
ParamValue dparam(double v) { return {v, std::nullopt}; }
ParamValue sparam(int s) { return {static_cast<double>(s), Rational(s)}; }

template <class T>
double logabs(const T& x) {
    return std::log(std::fabs(Num<T>::d(x)));
}

template <class T>
std::vector<T> nil_apply(const QMatrix& ad, const T& t, const std::vector<T>& x) {
    std::size_t n = x.size();
    std::vector<T> out = x, term = x;
    for (std::size_t k = 1; k <= n; ++k) {
        std::vector<T> next(n, T(0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (ad(i, j) != 0) next[i] += Num<T>::from(ad(i, j)) * term[j];
        for (auto& v : next) v = v * t / T(static_cast<long>(k));
        term = next;
        for (std::size_t i = 0; i < n; ++i) out[i] += term[i];
    }
    return out;
}

std::vector<Rational> unit(std::size_t n, std::size_t i) {
    std::vector<Rational> e(n, Rational(0));
    e[i] = 1;
    return e;
}

struct Affine {
    std::vector<Rational> base;
    std::vector<std::vector<Rational>> dirs;  // one per parameter
};

Affine affine_form(const SubalgebraRep& r) {
    Affine a;
    std::map<std::string, Expr> zero;
    for (const auto& p : r.params) zero[p.name] = Expr(0);
    std::set<std::string> names;
    for (const auto& p : r.params) names.insert(p.name);
    for (const auto& c : r.coeffs) {
        Expr b = expand(substitute(c, zero));
        if (!b.is_number()) throw Error(ErrorKind::Domain, "coefficient " + render(c) + " has unknown symbols");
        a.base.push_back(b.value());
    }
    for (const auto& p : r.params) {
        std::vector<Rational> d;
        for (const auto& c : r.coeffs) {
            Expr dc = expand(differentiate(c, p.name));
            if (!dc.is_number() || depends_on_any(dc, names))
                throw Error(ErrorKind::Domain, "coefficients must be affine in the parameters: " + render(c));
            d.push_back(dc.value());
        }
        a.dirs.push_back(d);
    }
    return a;
}

template <class T>
std::vector<T> member(const Affine& a, const std::vector<T>& values) {
    std::vector<T> v;
    for (const auto& b : a.base) v.push_back(Num<T>::from(b));
    for (std::size_t p = 0; p < a.dirs.size(); ++p)
        for (std::size_t i = 0; i < v.size(); ++i)
            if (a.dirs[p][i] != 0) v[i] += Num<T>::from(a.dirs[p][i]) * values[p];
    return v;
}

SubalgebraRep rep(const std::string& text, std::size_t dim, std::vector<ParamSpec> params = {}) {
    SymbolTable table;
    for (std::size_t i = 1; i <= dim; ++i) table.declare_variable("e" + std::to_string(i));
    for (const auto& p : params) table.declare_parameter(p.name);
    Expr e = parse(text, table);
    SubalgebraRep r;
    for (std::size_t i = 1; i <= dim; ++i) r.coeffs.push_back(expand(differentiate(e, "e" + std::to_string(i))));
    r.params = std::move(params);
    return r;
}

ParamSpec real(const std::string& n) { return {n, ParamKind::Real}; }
ParamSpec nonzero(const std::string& n) { return {n, ParamKind::NonZero}; }
ParamSpec positive(const std::string& n) { return {n, ParamKind::Positive}; }
ParamSpec nonneg(const std::string& n) { return {n, ParamKind::NonNegative}; }
ParamSpec eps() { return ParamSpec::sign("eps"); }

bool type_s(const std::string& k) {
    return k == "A3,2" || k == "A3,3" || k == "A3,4" || k == "A3,5^a" || k == "A3,6" || k == "A3,7^b";
}

bool abelian_label(const std::string& l) { return l == "A1" || l == "2A1" || l == "3A1" || l == "4A1"; }

// the 3-dim summand of a decomposable 4-dim class
std::optional<std::string> summand(const std::string& l) {
    if (l == "A2+2A1") return "A2+A1";
    if (l.size() > 3 && l.substr(l.size() - 3) == "+A1" && l != "A2+A1") return l.substr(0, l.size() - 3);
    return std::nullopt;
}

std::vector<SubalgebraRep> ray_entries3(const std::string& k) {
    if (k == "A2+A1") return {rep("e2 + k*e3", 3, {real("k")}), rep("e1", 3), rep("e3", 3), rep("e3 + eps*e1", 3, {eps()})};
    if (k == "A3,1") return {rep("e1", 3), rep("e3", 3), rep("e2 + k*e3", 3, {real("k")})};
    if (k == "A3,2") return {rep("e3", 3), rep("e1", 3), rep("e2", 3)};
    if (k == "A3,3") return {rep("e3", 3), rep("e2", 3), rep("e1 + k*e2", 3, {real("k")})};
    if (k == "A3,4" || k == "A3,5^a") return {rep("e3", 3), rep("e1", 3), rep("e2", 3), rep("e1 + eps*e2", 3, {eps()})};
    if (k == "A3,6" || k == "A3,7^b") return {rep("e3", 3), rep("e1", 3)};
    if (k == "A3,8") return {rep("e2", 3), rep("e1", 3), rep("e1 - e3", 3)};
    if (k == "A3,9") return {rep("e1", 3)};
    throw Error(ErrorKind::UnsupportedClass, "no orbit strategy for " + k);
}

std::vector<SubalgebraRep> vec_entries3(const std::string& k, const std::optional<Rational>& param) {
    if (k == "A2+A1")
        return {rep("e4 + k*e2 + l*e3", 4, {nonzero("k"), real("l")}), rep("e4 + eps*e1 + l*e3", 4, {eps(), real("l")}),
                rep("e4 + l*e3", 4, {real("l")})};
    if (k == "A3,1")
        return {rep("e4 + k*e1", 4, {real("k")}), rep("e4 + k*e2 + l*e3", 4, {nonzero("k"), real("l")}),
                rep("e4 + k*e3", 4, {nonzero("k")})};
    if (k == "A3,2")
        return {rep("e4 + k*e3", 4, {real("k")}), rep("e4 + k*e1 + eps*e2", 4, {real("k"), eps()}),
                rep("e4 + eps*e1", 4, {eps()})};
    if (k == "A3,3" || k == "A3,4" || k == "A3,5^a")
        return {rep("e4 + k*e3", 4, {real("k")}), rep("e4 + eps*e1 + k*e2", 4, {eps(), real("k")}),
                rep("e4 + eps*e2", 4, {eps()})};
    if (k == "A3,6") return {rep("e4 + k*e3", 4, {real("k")}), rep("e4 + k*e1", 4, {positive("k")})};
    if (k == "A3,7^b") {
        ParamSpec iv{"k", ParamKind::Interval};
        iv.lower = 1;
        iv.upper = std::exp(2 * std::numbers::pi * param->get_d());
        iv.upper_text = "exp(" + render(expand(Expr(*param) * Expr(2))) + "*pi)";
        return {rep("e4 + k*e3", 4, {real("k")}), rep("e4 + k*e1", 4, {iv})};
    }
    if (k == "A3,8")
        return {rep("e4 + k*e2", 4, {nonneg("k")}), rep("e4 + eps*e1", 4, {eps()}),
                rep("e4 + k*e1 - k*e3", 4, {nonzero("k")})};
    if (k == "A3,9") return {rep("e4 + k*e1", 4, {nonneg("k")})};
    throw Error(ErrorKind::UnsupportedClass, "no orbit strategy for " + k + "+A1");
}

std::vector<SubalgebraRep> abelian_entries(std::size_t n) {
    static const char* names[] = {"k", "l", "n"};
    std::vector<SubalgebraRep> out;
    for (std::size_t i = 0; i < n; ++i) {
        std::string text = "e" + std::to_string(i + 1);
        std::vector<ParamSpec> ps;
        for (std::size_t j = i + 1; j < n; ++j) {
            std::string p = names[ps.size()];
            text += " + " + p + "*e" + std::to_string(j + 1);
            ps.push_back(real(p));
        }
        out.push_back(rep(text, n, ps));
    }
    return out;
}

SubalgebraRep lift(const SubalgebraRep& r) {
    SubalgebraRep out = r;
    out.coeffs.push_back(Expr(0));
    return out;
}

// ---------------------------------------------------------------- orbit strategies

struct Ctx {
    std::string k;  // 3-dim class or full label
    const QAlgebra& can;
    std::optional<Rational> param;
};

void weyl(std::vector<WordStep>& w) {
    w.push_back(Num<Rational>::step(0, Rational(1)));
    w.push_back(Num<Rational>::step(2, Rational(-1)));
    w.push_back(Num<Rational>::step(0, Rational(1)));
}

// sl(2) basis [e1,e2]=e1, [e2,e3]=e3, [e1,e3]=-2e2: e1=E, e2=-H/2, e3=F
template <class T>
NormalForm sl2(const Ctx& c, std::vector<T> x, bool vec) {
    NormalForm nf;
    auto& w = nf.word;
    using N = Num<T>;
    QMatrix ad1 = c.can.ad(unit(3, 0));
    auto do_weyl = [&] {
        weyl(w);
        x = {-x[2], -x[1], -x[0]};
    };
    if (N::zero(x[0]) && N::zero(x[1]) && N::zero(x[2])) {
        nf.entry = 0;
        nf.params = {sparam(0)};
        return nf;
    }
    if (N::zero(x[2]) && N::zero(x[0])) {
        nf.entry = 0;
        if (vec) {
            if (N::sign(x[1]) < 0) do_weyl();
            nf.params = {N::param(x[1])};
        }
        return nf;
    }
    if (N::zero(x[2])) do_weyl();
    if (!N::zero(x[1])) {
        T t = x[1] / (T(2) * x[2]);
        w.push_back(N::step(0, t));
        x = nil_apply(ad1, t, x);
        x[1] = T(0);
    }
    if (N::zero(x[0])) {
        // nilpotent: x3 e3
        do_weyl();
        nf.entry = 1;
        if (vec) {
            double s = logabs(x[0]);
            if (s != 0) w.push_back(dstep(1, s));
            nf.params = {sparam(N::sign(x[0]))};
        }
        return nf;
    }
    int sigma = N::sign(x[0]) * N::sign(x[2]);
    double s = 0.5 * (logabs(x[0]) - logabs(x[2]));
    if (s != 0) w.push_back(dstep(1, s));
    std::optional<T> r = N::root(x[0] * x[2] * T(sigma), 2);
    ParamValue rv = r ? N::param(*r) : dparam(std::sqrt(std::fabs(N::d(x[0]) * N::d(x[2]))));
    int s1 = N::sign(x[0]);
    if (sigma > 0) {
        w.push_back(Num<Rational>::step(0, Rational(1)));
        w.push_back(Num<Rational>::step(2, Rational(-1, 2)));
        nf.entry = 0;
        if (vec) {
            // now -2*s1*r*e2
            if (-s1 < 0) weyl(w);
            ParamValue k = rv;
            k.value *= 2;
            if (k.exact) *k.exact *= 2;
            nf.params = {k};
        }
    } else {
        nf.entry = 2;
        if (vec) {
            ParamValue k = rv;
            k.value *= s1;
            if (k.exact) *k.exact *= s1;
            nf.params = {k};
        }
    }
    return nf;
}

template <class T>
NormalForm so3(std::vector<T> x, bool vec) {
    using N = Num<T>;
    NormalForm nf;
    double x1 = N::d(x[0]), x2 = N::d(x[1]), x3 = N::d(x[2]);
    if (!(N::zero(x[1]) && N::sign(x[0]) >= 0)) nf.word.push_back(dstep(2, -std::atan2(x2, x1)));
    double r = std::hypot(x1, x2);
    if (!N::zero(x[2])) nf.word.push_back(dstep(1, std::atan2(x3, r)));
    nf.entry = 0;
    if (vec) {
        auto k = N::root(x[0] * x[0] + x[1] * x[1] + x[2] * x[2], 2);
        nf.params = {k ? N::param(*k) : dparam(std::sqrt(x1 * x1 + x2 * x2 + x3 * x3))};
    }
    return nf;
}

template <class T>
NormalForm solvable3(const Ctx& c, const std::vector<T>& x, bool vec) {
    using N = Num<T>;
    NormalForm nf;
    auto& w = nf.word;
    const std::string& k = c.k;
    if (k == "A2+A1") {
        if (!N::zero(x[1])) {
            if (!N::zero(x[0])) w.push_back(N::step(0, -x[0] / x[1]));
            nf.entry = 0;
            nf.params = vec ? std::vector<ParamValue>{N::param(x[1]), N::param(x[2])}
                            : std::vector<ParamValue>{N::param(x[2] / x[1])};
            return nf;
        }
        if (vec) {
            if (!N::zero(x[0])) {
                double s = logabs(x[0]);
                if (s != 0) w.push_back(dstep(1, s));
                nf.entry = 1;
                nf.params = {sparam(N::sign(x[0])), N::param(x[2])};
            } else {
                nf.entry = 2;
                nf.params = {N::param(x[2])};
            }
            return nf;
        }
        if (N::zero(x[0])) nf.entry = 2;
        else if (N::zero(x[2])) nf.entry = 1;
        else {
            double s = logabs(x[0]) - logabs(x[2]);
            if (s != 0) w.push_back(dstep(1, s));
            nf.entry = 3;
            nf.params = {sparam(N::sign(x[0]) * N::sign(x[2]))};
        }
        return nf;
    }
    if (k == "A3,1") {
        if (!N::zero(x[2])) {
            if (!N::zero(x[0])) w.push_back(N::step(1, -x[0] / x[2]));
        } else if (!N::zero(x[1])) {
            if (!N::zero(x[0])) w.push_back(N::step(2, x[0] / x[1]));
        }
        if (N::zero(x[1]) && N::zero(x[2])) {
            nf.entry = 0;
            if (vec) nf.params = {N::param(x[0])};
        } else if (N::zero(x[1])) {
            nf.entry = vec ? 2 : 1;
            if (vec) nf.params = {N::param(x[2])};
        } else {
            nf.entry = vec ? 1 : 2;
            nf.params = vec ? std::vector<ParamValue>{N::param(x[1]), N::param(x[2])}
                            : std::vector<ParamValue>{N::param(x[2] / x[1])};
        }
        return nf;
    }
    // D = <e1, e2> abelian, R(Y) = [Y, e3] invertible on D
    T r00 = N::from(c.can.C(0, 2, 0)), r10 = N::from(c.can.C(0, 2, 1));
    T r01 = N::from(c.can.C(1, 2, 0)), r11 = N::from(c.can.C(1, 2, 1));
    const T& y1 = x[0];
    const T& y2 = x[1];
    const T& cc = x[2];
    if (!N::zero(cc) || (vec && N::zero(y1) && N::zero(y2))) {
        if (!N::zero(cc)) {
            // z = -R^{-1} y / c kills y: exp(ad z) v = v + c R(z)
            T det = r00 * r11 - r01 * r10;
            T z1 = -(r11 * y1 - r01 * y2) / (det * cc);
            T z2 = -(-r10 * y1 + r00 * y2) / (det * cc);
            if (!N::zero(z1)) w.push_back(N::step(0, z1));
            if (!N::zero(z2)) w.push_back(N::step(1, z2));
        }
        nf.entry = 0;
        if (vec) nf.params = {N::param(cc)};
        return nf;
    }
    if (k == "A3,2") {
        if (!vec) {
            if (N::zero(y2)) {
                nf.entry = 1;
            } else {
                if (!N::zero(y1)) w.push_back(N::step(2, y1 / y2));
                nf.entry = 2;
            }
            return nf;
        }
        // exp(-sR) y = e^{-s}((y1 - s y2) e1 + y2 e2)
        if (!N::zero(y2)) {
            double s = logabs(y2);
            nf.entry = 1;
            if (s == 0) {
                nf.params = {N::param(y1 / y2 * T(N::sign(y2))), sparam(N::sign(y2))};
            } else {
                w.push_back(dstep(2, s));
                nf.params = {dparam((N::d(y1) - s * N::d(y2)) / std::fabs(N::d(y2))), sparam(N::sign(y2))};
            }
        } else {
            double s = logabs(y1);
            if (s != 0) w.push_back(dstep(2, s));
            nf.entry = 2;
            nf.params = {sparam(N::sign(y1))};
        }
        return nf;
    }
    if (k == "A3,3") {
        if (!vec) {
            if (N::zero(y1)) nf.entry = 1;
            else {
                nf.entry = 2;
                nf.params = {N::param(y2 / y1)};
            }
            return nf;
        }
        if (!N::zero(y1)) {
            double s = logabs(y1);
            if (s != 0) w.push_back(dstep(2, s));
            nf.entry = 1;
            nf.params = {sparam(N::sign(y1)), N::param(y2 / (y1 * T(N::sign(y1))))};
        } else {
            double s = logabs(y2);
            if (s != 0) w.push_back(dstep(2, s));
            nf.entry = 2;
            nf.params = {sparam(N::sign(y2))};
        }
        return nf;
    }
    if (k == "A3,4" || k == "A3,5^a") {
        Rational a = c.can.C(1, 2, 1);
        double ad = a.get_d();
        if (!vec) {
            if (N::zero(y2)) nf.entry = 1;
            else if (N::zero(y1)) nf.entry = 2;
            else {
                double s = (logabs(y1) - logabs(y2)) / (1 - ad);
                if (s != 0) w.push_back(dstep(2, s));
                nf.entry = 3;
                nf.params = {sparam(N::sign(y1) * N::sign(y2))};
            }
            return nf;
        }
        // exp(-sR) y = (e^{-s} y1, e^{-a s} y2)
        if (!N::zero(y1)) {
            double s = logabs(y1);
            if (s != 0) w.push_back(dstep(2, s));
            nf.entry = 1;
            // k = y2 |y1|^{-a}
            std::optional<T> kx;
            if constexpr (std::is_same_v<T, Rational>) {
                Rational ay = abs(y1);
                long p = a.get_num().get_si(), q = a.get_den().get_si();
                if (auto rt = rational_root(rational_pow(ay, -p), static_cast<unsigned long>(q))) kx = y2 * *rt;
            }
            nf.params = {sparam(N::sign(y1)),
                         kx ? N::param(*kx) : dparam(N::d(y2) * std::pow(std::fabs(N::d(y1)), -ad))};
        } else {
            double s = logabs(y2) / ad;
            if (s != 0) w.push_back(dstep(2, s));
            nf.entry = 2;
            nf.params = {sparam(N::sign(y2))};
        }
        return nf;
    }
    // A3,6 and A3,7^b: exp(-sR) = e^{-bs} rot(s)
    double th = std::atan2(N::d(y2), N::d(y1));
    nf.entry = 1;
    if (!vec) {
        if (th != 0) w.push_back(dstep(2, -th));
        return nf;
    }
    double mag = std::hypot(N::d(y1), N::d(y2));
    if (k == "A3,6") {
        if (th != 0) w.push_back(dstep(2, -th));
        auto kr = N::root(y1 * y1 + y2 * y2, 2);
        nf.params = {kr ? N::param(*kr) : dparam(mag)};
        return nf;
    }
    double b = c.param->get_d();
    double lg = std::log(mag) + b * th;
    double n = std::floor(lg / (2 * std::numbers::pi * b));
    double s = -th + 2 * std::numbers::pi * n;
    if (s != 0) w.push_back(dstep(2, s));
    nf.params = {dparam(std::exp(lg - 2 * std::numbers::pi * b * n))};
    return nf;
}

template <class T>
NormalForm three(const Ctx& c, const std::vector<T>& x, bool vec) {
    if (c.k == "A3,8") return sl2(c, x, vec);
    if (c.k == "A3,9") return so3(x, vec);
    return solvable3(c, x, vec);
}

template <class T>
NormalForm abelian(const std::vector<T>& x) {
    NormalForm nf;
    std::size_t i = 0;
    while (i < x.size() && Num<T>::zero(x[i])) ++i;
    nf.entry = i;
    for (std::size_t j = i + 1; j < x.size(); ++j) nf.params.push_back(Num<T>::param(x[j] / x[i]));
    return nf;
}

template <class T>
NormalForm two_a2(const std::vector<T>& x) {
    using N = Num<T>;
    NormalForm nf;
    auto& w = nf.word;
    // 0 zero, 1 e1-type, 2 e2-type for each summand
    int ta = !N::zero(x[1]) ? 2 : !N::zero(x[0]) ? 1 : 0;
    int tb = !N::zero(x[3]) ? 2 : !N::zero(x[2]) ? 1 : 0;
    if (ta == 2 && !N::zero(x[0])) w.push_back(N::step(0, -x[0] / x[1]));
    if (tb == 2 && !N::zero(x[2])) w.push_back(N::step(2, -x[2] / x[3]));
    auto scale = [&](std::size_t g, double s) {
        if (s != 0) w.push_back(dstep(g, s));
    };
    if (ta == 2 && tb != 1) {
        nf.entry = 0;
        nf.params = {N::param(tb == 2 ? x[3] / x[1] : T(0))};
    } else if (ta == 0 && tb == 2) {
        nf.entry = 1;
    } else if (ta == 2 && tb == 1) {
        scale(3, logabs(x[2]) - logabs(x[1]));
        nf.entry = 2;
        nf.params = {sparam(N::sign(x[1]) * N::sign(x[2]))};
    } else if (ta == 1 && tb == 2) {
        scale(1, logabs(x[0]) - logabs(x[3]));
        nf.entry = 3;
        nf.params = {sparam(N::sign(x[0]) * N::sign(x[3]))};
    } else if (ta == 1 && tb == 0) {
        nf.entry = 4;
    } else if (ta == 0 && tb == 1) {
        nf.entry = 5;
    } else {
        scale(1, logabs(x[0]) - logabs(x[2]));
        nf.entry = 6;
        nf.params = {sparam(N::sign(x[0]) * N::sign(x[2]))};
    }
    return nf;
}

} // namespace

bool same_class(const NormalForm& a, const NormalForm& b, double tol) {
    if (a.entry != b.entry || a.params.size() != b.params.size()) return false;
    for (std::size_t i = 0; i < a.params.size(); ++i) {
        const auto& p = a.params[i];
        const auto& q = b.params[i];
        if (p.exact && q.exact) {
            if (*p.exact != *q.exact) return false;
        } else if (std::fabs(p.value - q.value) > tol * (1 + std::fabs(p.value))) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------- classifier

OrbitClassifier::OrbitClassifier(const QAlgebra& q) : q_(q), label_(identify(q)) {
    can_ = canonical_algebra(label_.name, label_.param);
    w_ = label_.witness;
    winv_ = w_.inverse();
    const std::string& l = label_.name;
    if (abelian_label(l)) {
        entries_ = abelian_entries(q.dim);
    } else if (l == "A2") {
        entries_ = {rep("e1", 2), rep("e2", 2)};
    } else if (l == "2A2") {
        entries_ = {rep("e2 + k*e4", 4, {real("k")}), rep("e4", 4), rep("e2 + eps*e3", 4, {eps()}),
                    rep("e4 + eps*e1", 4, {eps()}), rep("e1", 4), rep("e3", 4), rep("e1 + eps*e3", 4, {eps()})};
    } else if (q.dim == 3) {
        entries_ = ray_entries3(l);
    } else if (auto k = summand(l)) {
        for (const auto& r : ray_entries3(*k)) entries_.push_back(lift(r));
        ray_entries_ = entries_.size();
        for (const auto& r : vec_entries3(*k, label_.param)) entries_.push_back(r);
    } else {
        throw Error(ErrorKind::UnsupportedClass, "no orbit strategy for " + l);
    }
    for (std::size_t i = 0; i < q.dim; ++i) ad_.push_back(to_eigen(q_.ad(w_.col(i))));
}

std::vector<SubalgebraRep> OrbitClassifier::optimal_system() const {
    std::vector<SubalgebraRep> out;
    for (const auto& e : entries_) {
        SubalgebraRep r;
        r.params = e.params;
        for (std::size_t i = 0; i < q_.dim; ++i) {
            std::vector<Expr> terms;
            for (std::size_t j = 0; j < q_.dim; ++j)
                if (w_(i, j) != 0) terms.push_back(Expr(w_(i, j)) * e.coeffs[j]);
            r.coeffs.push_back(expand(add(terms)));
        }
        for (const auto& c : r.coeffs) {
            if (c.is_zero()) continue;
            if (c.is_number()) {
                Expr s(1 / c.value());
                for (auto& d : r.coeffs) d = expand(d * s);
            }
            break;
        }
        out.push_back(r);
    }
    return out;
}

template <class T>
NormalForm OrbitClassifier::classify(const std::vector<T>& x) const {
    const std::string& l = label_.name;
    if (abelian_label(l)) return abelian(x);
    if (l == "A2") {
        NormalForm nf;
        if (!Num<T>::zero(x[1])) {
            nf.entry = 1;
            if (!Num<T>::zero(x[0])) nf.word.push_back(Num<T>::step(0, -x[0] / x[1]));
        }
        return nf;
    }
    if (l == "2A2") return two_a2(x);
    if (q_.dim == 3) return three(Ctx{l, can_, label_.param}, x, false);
    auto k = summand(l);
    // the 3-dim part of the catalog constants
    QAlgebra k3(3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t m = 0; m < 3; ++m) k3.C(i, j, m) = can_.C(i, j, m);
    Ctx c{*k, k3, label_.param};
    std::vector<T> head(x.begin(), x.begin() + 3);
    if (Num<T>::zero(x[3])) return three(c, head, false);
    for (auto& h : head) h = h / x[3];
    NormalForm nf = three(c, head, true);
    nf.entry += ray_entries_;
    return nf;
}

std::vector<double> OrbitClassifier::entry_vector(std::size_t e, const std::vector<ParamValue>& params) const {
    Affine a = affine_form(entries_.at(e));
    std::vector<double> vals;
    for (const auto& p : params) vals.push_back(p.value);
    return member(a, vals);
}

Eigen::VectorXd OrbitClassifier::apply_word(const std::vector<WordStep>& w, const Eigen::VectorXd& v) const {
    Eigen::VectorXd x = v;
    for (const auto& s : w) x = expm(ad_[s.generator] * s.value) * x;
    return x;
}

std::optional<std::vector<Rational>> OrbitClassifier::apply_word_exact(const std::vector<WordStep>& w,
                                                                       const std::vector<Rational>& v) const {
    std::vector<Rational> x = v;
    for (const auto& s : w) {
        if (!s.exact) return std::nullopt;
        QMatrix a = q_.ad(w_.col(s.generator));
        if (!is_nilpotent(a)) return std::nullopt;
        x = exp_nilpotent(a, s.q) * x;
    }
    return x;
}

double projective_residual(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    double na = a.norm(), nb = b.norm();
    if (na == 0 || nb == 0) return na == nb ? 0.0 : 1.0;
    Eigen::VectorXd x = a / na, y = b / nb;
    return std::min((x - y).norm(), (x + y).norm());
}

double OrbitClassifier::check(NormalForm& nf, const Eigen::VectorXd& input) const {
    auto target = entry_vector(nf.entry, nf.params);
    Eigen::VectorXd t = to_eigen(w_) * Eigen::Map<Eigen::VectorXd>(target.data(), target.size());
    nf.residual = projective_residual(apply_word(nf.word, input), t);
    return nf.residual;
}

NormalForm OrbitClassifier::normal_form(const std::vector<Rational>& v) const {
    if (v.size() != q_.dim) throw Error(ErrorKind::Domain, "vector has the wrong dimension");
    if (std::all_of(v.begin(), v.end(), [](const Rational& r) { return r == 0; }))
        throw Error(ErrorKind::Domain, "zero vector spans no subalgebra");
    NormalForm nf = classify(winv_ * v);
    check(nf, to_eigen(v));
    return nf;
}

NormalForm OrbitClassifier::normal_form(const std::vector<double>& v) const {
    if (v.size() != q_.dim) throw Error(ErrorKind::Domain, "vector has the wrong dimension");
    Eigen::VectorXd x = to_eigen(winv_) * Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
    double m = x.cwiseAbs().maxCoeff();
    if (m == 0) throw Error(ErrorKind::Domain, "zero vector spans no subalgebra");
    std::vector<double> c(x.data(), x.data() + x.size());
    for (auto& e : c) e /= m;
    NormalForm nf = classify(c);
    check(nf, Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()));
    return nf;
}

namespace {

std::string fmt(double v) {
    std::ostringstream o;
    o << std::setprecision(12) << v;
    return o.str();
}

std::string vec_text(const std::vector<Rational>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + render(v[i]);
    return s + "]";
}

std::string vec_text(const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s + "]";
}

std::string render_vec(const std::vector<Rational>& v, const std::string& prefix) { return make_rep(v).render(prefix); }

} // namespace

std::string OrbitClassifier::render_word(const std::vector<WordStep>& w, const std::string& prefix) const {
    if (w.empty()) return "(empty)";
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) s += " ; ";
        s += "exp(" + (w[i].exact ? render(w[i].q) : fmt(w[i].value)) + " * (" + render_vec(generator(w[i].generator), prefix) +
             "))";
    }
    return s;
}

std::string OrbitClassifier::describe(const NormalForm& nf) const {
    std::string s = "entry " + std::to_string(nf.entry + 1) + " (" + entries_.at(nf.entry).render("e") + ")";
    const auto& ps = entries_[nf.entry].params;
    for (std::size_t i = 0; i < ps.size() && i < nf.params.size(); ++i)
        s += (i ? ", " : " at ") + ps[i].name + "=" + (nf.params[i].exact ? render(*nf.params[i].exact) : fmt(nf.params[i].value));
    return s;
}

std::vector<WordStep> inverse(const std::vector<WordStep>& w) {
    std::vector<WordStep> out(w.rbegin(), w.rend());
    for (auto& s : out) {
        s.q = -s.q;
        s.value = -s.value;
    }
    return out;
}

const char* to_string(ConjugacyStatus s) {
    switch (s) {
    case ConjugacyStatus::Conjugate: return "Conjugate";
    case ConjugacyStatus::NotConjugate: return "NotConjugate";
    case ConjugacyStatus::Undecided: return "Undecided";
    }
    return "?";
}

// ---------------------------------------------------------------- invariants

namespace {

std::vector<QMatrix> series(const QAlgebra& q, bool derived) {
    std::vector<QMatrix> out = {QMatrix::identity(q.dim)};
    for (;;) {
        const QMatrix& cur = out.back();
        QMatrix next;
        if (derived) {
            next = derived_algebra(q, cur);
        } else {
            std::vector<std::vector<Rational>> vs;
            for (std::size_t a = 0; a < cur.cols(); ++a)
                for (std::size_t j = 0; j < q.dim; ++j) vs.push_back(q.bracket(unit(q.dim, j), cur.col(a)));
            next = span(vs, q.dim);
        }
        if (next.cols() == cur.cols()) break;
        out.push_back(next);
        if (next.cols() == 0) break;
    }
    return out;
}

bool in_span(const QMatrix& b, const std::vector<Rational>& v) {
    if (b.cols() == 0) return is_zero_vector(v);
    std::vector<Rational> y;
    return b.solve(v, y);
}

std::size_t depth(const std::vector<QMatrix>& s, const std::vector<Rational>& v) {
    std::size_t d = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (in_span(s[i], v)) d = i;
    return d;
}

std::vector<Rational> normalized(std::vector<Rational> v) {
    for (const auto& x : v)
        if (x != 0) {
            Rational f = x;
            for (auto& y : v) y /= f;
            break;
        }
    return v;
}

bool same_ray(const std::vector<Rational>& a, const std::vector<Rational>& b) { return normalized(a) == normalized(b); }

// coordinates of v in L/D for a fixed complement of D
std::vector<Rational> quotient(const QMatrix& d, const std::vector<Rational>& v) {
    std::size_t n = v.size();
    std::vector<std::vector<Rational>> cols;
    for (std::size_t j = 0; j < d.cols(); ++j) cols.push_back(d.col(j));
    std::vector<std::size_t> comp;
    for (std::size_t i = 0; i < n && cols.size() < n; ++i) {
        auto cand = cols;
        cand.push_back(unit(n, i));
        if (span(cand, n).cols() == cand.size()) {
            cols = cand;
            comp.push_back(i);
        }
    }
    QMatrix m(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) m(i, j) = cols[j][i];
    std::vector<Rational> y;
    m.solve(v, y);
    return std::vector<Rational>(y.begin() + static_cast<long>(d.cols()), y.end());
}

// b_k = lambda^k a_k for some real lambda != 0, k = 1..n
bool projectively_equal(const std::vector<Rational>& a, const std::vector<Rational>& b) {
    std::vector<std::pair<long, Rational>> r;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if ((a[i] == 0) != (b[i] == 0)) return false;
        if (a[i] != 0) r.push_back({static_cast<long>(i) + 1, b[i] / a[i]});
    }
    for (const auto& [k, v] : r)
        if (k % 2 == 0 && v <= 0) return false;
    for (std::size_t i = 0; i < r.size(); ++i)
        for (std::size_t j = i + 1; j < r.size(); ++j)
            if (rational_pow(r[i].second, r[j].first) != rational_pow(r[j].second, r[i].first)) return false;
    return true;
}

std::vector<Rational> spectrum_coeffs(const QAlgebra& q, const std::vector<Rational>& v) {
    QPoly p = charpoly(q.ad(v));
    std::size_t n = q.dim;
    std::vector<Rational> out;
    for (std::size_t k = 1; k <= n; ++k) out.push_back(p.coeff(static_cast<int>(n - k)));
    return out;
}

} // namespace

std::optional<InvariantDifference> separating_invariant(const QAlgebra& q, const std::vector<Rational>& v,
                                                        const std::vector<Rational>& w) {
    auto ds = series(q, true);
    std::size_t dv = depth(ds, v), dw = depth(ds, w);
    if (dv != dw) return InvariantDifference{"derived series depth", std::to_string(dv), std::to_string(dw)};
    auto ls = series(q, false);
    dv = depth(ls, v);
    dw = depth(ls, w);
    if (dv != dw) return InvariantDifference{"lower central series depth", std::to_string(dv), std::to_string(dw)};
    QMatrix z = center(q);
    bool zv = in_span(z, v), zw = in_span(z, w);
    if (zv != zw) return InvariantDifference{"center membership", zv ? "yes" : "no", zw ? "yes" : "no"};
    if (ds.size() > 1) {
        auto qv = quotient(ds[1], v), qw = quotient(ds[1], w);
        bool zerov = is_zero_vector(qv), zerow = is_zero_vector(qw);
        if (zerov != zerow || (!zerov && !same_ray(qv, qw)))
            return InvariantDifference{"line modulo the derived algebra", vec_text(normalized(qv)), vec_text(normalized(qw))};
    }
    auto sv = spectrum_coeffs(q, v), sw = spectrum_coeffs(q, w);
    if (!projectively_equal(sv, sw))
        return InvariantDifference{"projective spectrum of ad", vec_text(sv), vec_text(sw)};
    return std::nullopt;
}

ConjugacyVerdict are_conjugate(const OrbitClassifier& c, const std::vector<Rational>& v, const std::vector<Rational>& w) {
    ConjugacyVerdict out;
    if (is_zero_vector(v) || is_zero_vector(w)) throw Error(ErrorKind::Domain, "zero vector spans no subalgebra");
    if (same_ray(v, w)) {
        out.verdict = ConjugacyStatus::Conjugate;
        out.witness = ConjugacyWitness{{}, 0.0, true};
        return out;
    }
    if (auto d = separating_invariant(c.algebra(), v, w)) {
        out.verdict = ConjugacyStatus::NotConjugate;
        out.invariant = d->name;
        out.value_v = d->value_v;
        out.value_w = d->value_w;
        return out;
    }
    NormalForm nv = c.normal_form(v), nw = c.normal_form(w);
    if (!same_class(nv, nw)) {
        out.verdict = ConjugacyStatus::NotConjugate;
        out.invariant = "adjoint normal form";
        out.value_v = c.describe(nv);
        out.value_w = c.describe(nw);
        return out;
    }
    ConjugacyWitness wit;
    wit.word = nv.word;
    auto back = inverse(nw.word);
    wit.word.insert(wit.word.end(), back.begin(), back.end());
    if (auto ex = c.apply_word_exact(wit.word, v); ex && same_ray(*ex, w)) {
        wit.exact = true;
        wit.residual = 0;
    } else {
        wit.residual = projective_residual(c.apply_word(wit.word, to_eigen(v)), to_eigen(w));
    }
    out.verdict = wit.residual <= kTol ? ConjugacyStatus::Conjugate : ConjugacyStatus::Undecided;
    out.witness = wit;
    return out;
}

ConjugacyVerdict are_conjugate(const QAlgebra& q, const std::vector<Rational>& v, const std::vector<Rational>& w) {
    try {
        OrbitClassifier c(q);
        return are_conjugate(c, v, w);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::UnsupportedClass && e.kind() != ErrorKind::Unidentified) throw;
    }
    ConjugacyVerdict out;
    if (same_ray(v, w)) {
        out.verdict = ConjugacyStatus::Conjugate;
        out.witness = ConjugacyWitness{{}, 0.0, true};
    } else if (auto d = separating_invariant(q, v, w)) {
        out.verdict = ConjugacyStatus::NotConjugate;
        out.invariant = d->name;
        out.value_v = d->value_v;
        out.value_w = d->value_w;
    }
    return out;
}

std::vector<SubalgebraRep> construct_optimal_system(const QAlgebra& q) { return OrbitClassifier(q).optimal_system(); }

// ---------------------------------------------------------------- audits

std::uint64_t default_seed() {
    if (const char* s = std::getenv("LIESYM_SEED")) {
        try {
            return std::stoull(s);
        } catch (const std::exception&) {
            throw Error(ErrorKind::Usage, std::string("LIESYM_SEED is not an integer: ") + s);
        }
    }
    return 20200301;
}

namespace {

struct Member {
    std::vector<double> params;
    std::vector<double> vec;
    NormalForm nf;
};

struct Compiled {
    SubalgebraRep rep;
    Affine aff;
    std::vector<std::size_t> discrete, continuous;
    std::vector<std::vector<Rational>> assignments;  // values of discrete params
    std::vector<Member> fixed;                       // members with all discrete (m == 0)
    std::vector<std::vector<Member>> grid;           // per assignment, m == 1
};

std::vector<double> full_params(const Compiled& c, const std::vector<Rational>& asg, const std::vector<double>& cont) {
    std::vector<double> p(c.rep.params.size(), 0.0);
    for (std::size_t i = 0; i < c.discrete.size(); ++i) p[c.discrete[i]] = asg[i].get_d();
    for (std::size_t i = 0; i < c.continuous.size(); ++i) p[c.continuous[i]] = cont[i];
    return p;
}

std::vector<double> grid_values() {
    std::vector<double> g;
    for (int i = -64; i <= 64; ++i) g.push_back(i / 8.0);
    for (double v : {-64.0, -32.0, -16.0, -12.0, 12.0, 16.0, 32.0, 64.0, 1.0 / 16, -1.0 / 16, 1.0 / 32, -1.0 / 32}) g.push_back(v);
    std::sort(g.begin(), g.end());
    return g;
}

Compiled compile(const OrbitClassifier& oc, const SubalgebraRep& r) {
    Compiled c;
    c.rep = r;
    c.aff = affine_form(r);
    for (std::size_t i = 0; i < r.params.size(); ++i)
        (r.params[i].kind == ParamKind::Set ? c.discrete : c.continuous).push_back(i);
    c.assignments = {{}};
    for (auto i : c.discrete) {
        std::vector<std::vector<Rational>> next;
        for (const auto& a : c.assignments)
            for (const auto& v : r.params[i].values) {
                auto b = a;
                b.push_back(v);
                next.push_back(b);
            }
        c.assignments = next;
    }
    auto make = [&](const std::vector<Rational>& asg, const std::vector<double>& cont) -> std::optional<Member> {
        Member m;
        m.params = full_params(c, asg, cont);
        m.vec = member(c.aff, m.params);
        if (std::all_of(m.vec.begin(), m.vec.end(), [](double x) { return std::fabs(x) < kZero; })) return std::nullopt;
        // exact evaluation keeps rational branch decisions exact
        bool exact = true;
        std::vector<Rational> pq;
        for (double v : m.params) {
            Rational q(v);
            if (q.get_d() != v) exact = false;
            pq.push_back(q);
        }
        m.nf = exact ? oc.normal_form(member(c.aff, pq)) : oc.normal_form(m.vec);
        return m;
    };
    if (c.continuous.empty()) {
        for (const auto& a : c.assignments)
            if (auto m = make(a, {})) c.fixed.push_back(*m);
    } else if (c.continuous.size() == 1) {
        const auto& spec = r.params[c.continuous[0]];
        for (const auto& a : c.assignments) {
            std::vector<Member> g;
            for (double v : grid_values())
                if (spec.admits(v))
                    if (auto m = make(a, {v})) g.push_back(*m);
            c.grid.push_back(g);
        }
    }
    return c;
}

struct Match {
    Member m;
};

struct Coverage {
    std::optional<Match> match;
    bool decisive = true;
};

std::optional<std::size_t> first_continuous(const OrbitClassifier& oc, std::size_t entry) {
    const auto& ps = oc.entries()[entry].params;
    for (std::size_t i = 0; i < ps.size(); ++i)
        if (ps[i].kind != ParamKind::Set) return i;
    return std::nullopt;
}

// is the line with normal form nf (and input vector d) conjugate to a member of c?
Coverage cover(const OrbitClassifier& oc, const Compiled& c, const NormalForm& nf, const std::vector<double>& d) {
    Coverage out;
    if (c.continuous.empty()) {
        for (const auto& m : c.fixed)
            if (same_class(m.nf, nf)) {
                out.match = Match{m};
                return out;
            }
        return out;
    }
    std::size_t n = d.size(), mcont = c.continuous.size();
    auto target_rep = oc.entry_vector(nf.entry, nf.params);
    Eigen::VectorXd rep_in = to_eigen(oc.algebra().dim ? QMatrix::identity(n) : QMatrix()) * 0;
    {
        Eigen::VectorXd t = Eigen::Map<Eigen::VectorXd>(target_rep.data(), target_rep.size());
        QMatrix wm(n, n);
        for (std::size_t j = 0; j < n; ++j) {
            auto col = oc.generator(j);
            for (std::size_t i = 0; i < n; ++i) wm(i, j) = col[i];
        }
        rep_in = to_eigen(wm) * t;
    }
    std::vector<Eigen::VectorXd> targets = {Eigen::Map<const Eigen::VectorXd>(d.data(), n), rep_in};
    for (std::size_t ai = 0; ai < c.assignments.size(); ++ai) {
        const auto& asg = c.assignments[ai];
        std::vector<double> zero(mcont, 0.0);
        auto base = member(c.aff, full_params(c, asg, zero));
        // (a) linear: base + sum theta_j dir_j = lambda * target
        for (const auto& t : targets) {
            Eigen::MatrixXd a(n, mcont + 1);
            Eigen::VectorXd rhs(n);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < mcont; ++j) a(i, j) = c.aff.dirs[c.continuous[j]][i].get_d();
                a(i, mcont) = -t(i);
                rhs(i) = -base[i];
            }
            Eigen::VectorXd sol = a.colPivHouseholderQr().solve(rhs);
            if ((a * sol - rhs).norm() > 1e-10 * (1 + rhs.norm())) continue;
            std::vector<double> cont(sol.data(), sol.data() + mcont);
            bool ok = true;
            for (std::size_t j = 0; j < mcont; ++j) {
                double& v = cont[j];
                double r = std::round(v * 1e9) / 1e9;
                if (std::fabs(r - v) < 1e-11) v = r;
                ok = ok && c.rep.params[c.continuous[j]].admits(v);
            }
            if (!ok) continue;
            Member m;
            m.params = full_params(c, asg, cont);
            m.vec = member(c.aff, m.params);
            try {
                m.nf = oc.normal_form(m.vec);
            } catch (const Error&) {
                continue;
            }
            if (same_class(m.nf, nf)) {
                out.match = Match{m};
                return out;
            }
        }
        // (b) one continuous parameter: grid scan and bisection
        if (mcont != 1) {
            out.decisive = false;
            continue;
        }
        const auto& g = c.grid[ai];
        auto pc = first_continuous(oc, nf.entry);
        bool seen = false;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (g[i].nf.entry != nf.entry) continue;
            seen = true;
            if (same_class(g[i].nf, nf)) {
                out.match = Match{g[i]};
                return out;
            }
        }
        if (!seen) continue;
        if (!pc) {
            out.decisive = false;
            continue;
        }
        auto discrete_ok = [&](const NormalForm& x) {
            for (std::size_t i = 0; i < x.params.size(); ++i)
                if (i != *pc && !(x.params[i].exact && nf.params[i].exact ? *x.params[i].exact == *nf.params[i].exact
                                                                          : std::fabs(x.params[i].value - nf.params[i].value) < kTol))
                    return false;
            return true;
        };
        double want = nf.params[*pc].value;
        for (std::size_t i = 0; i + 1 < g.size(); ++i) {
            const auto& l = g[i];
            const auto& r = g[i + 1];
            if (l.nf.entry != nf.entry || r.nf.entry != nf.entry || !discrete_ok(l.nf) || !discrete_ok(r.nf)) continue;
            double fl = l.nf.params[*pc].value - want, fr = r.nf.params[*pc].value - want;
            if ((fl > 0) == (fr > 0)) continue;
            double lo = l.params[c.continuous[0]], hi = r.params[c.continuous[0]];
            Member best;
            for (int it = 0; it < 200 && hi - lo > 1e-15 * (1 + std::fabs(lo)); ++it) {
                double mid = 0.5 * (lo + hi);
                Member m;
                m.params = full_params(c, asg, {mid});
                m.vec = member(c.aff, m.params);
                m.nf = oc.normal_form(m.vec);
                if (m.nf.entry != nf.entry) break;
                best = m;
                double fm = m.nf.params[*pc].value - want;
                if ((fm > 0) == (fl > 0)) lo = mid;
                else hi = mid;
            }
            if (!best.vec.empty() && same_class(best.nf, nf)) {
                out.match = Match{best};
                return out;
            }
        }
        out.decisive = false;
    }
    return out;
}

std::vector<Rational> random_direction(std::mt19937_64& rng, std::size_t n) {
    for (;;) {
        std::vector<Rational> v;
        for (std::size_t i = 0; i < n; ++i) {
            long den = 1 + static_cast<long>(rng() % 4);
            long num = static_cast<long>(rng() % static_cast<std::uint64_t>(10 * den + 1)) - 5 * den;
            v.push_back(make_rational(num, den));
        }
        if (!is_zero_vector(v)) return v;
    }
}

std::vector<Member> samples_of(const OrbitClassifier& oc, const Compiled& c) {
    if (c.continuous.empty()) return c.fixed;
    std::vector<double> picks = {-2, -1, -0.5, 0, 1.0 / 3, 1, 2};
    std::vector<Member> out;
    if (c.continuous.size() == 1) {
        const auto& spec = c.rep.params[c.continuous[0]];
        if (spec.kind == ParamKind::Interval) picks = {spec.lower, 0.5 * (spec.lower + spec.upper)};
        for (const auto& g : c.grid)
            for (const auto& m : g)
                for (double p : picks)
                    if (m.params[c.continuous[0]] == p) out.push_back(m);
        return out;
    }
    for (const auto& asg : c.assignments)
        for (double p : picks)
            for (double r : {-1.0, 0.0, 2.0}) {
                std::vector<double> cont(c.continuous.size(), r);
                cont[0] = p;
                bool ok = true;
                for (std::size_t j = 0; j < cont.size(); ++j) ok = ok && c.rep.params[c.continuous[j]].admits(cont[j]);
                if (!ok) continue;
                Member m;
                m.params = full_params(c, asg, cont);
                m.vec = member(c.aff, m.params);
                if (std::all_of(m.vec.begin(), m.vec.end(), [](double x) { return x == 0; })) continue;
                m.nf = oc.normal_form(m.vec);
                out.push_back(m);
            }
    return out;
}

ConjugacyWitness witness_between(const OrbitClassifier& oc, const Member& a, const Member& b) {
    ConjugacyWitness w;
    w.word = a.nf.word;
    auto back = inverse(b.nf.word);
    w.word.insert(w.word.end(), back.begin(), back.end());
    Eigen::VectorXd va = Eigen::Map<const Eigen::VectorXd>(a.vec.data(), a.vec.size());
    Eigen::VectorXd vb = Eigen::Map<const Eigen::VectorXd>(b.vec.data(), b.vec.size());
    w.residual = projective_residual(oc.apply_word(w.word, va), vb);
    w.exact = false;
    return w;
}

} // namespace

AuditReport verify_candidate_system(const OrbitClassifier& oc, const std::vector<SubalgebraRep>& candidates,
                                    const AuditOptions& opts) {
    AuditReport rep;
    rep.algebra = oc.label().render();
    rep.seed = opts.seed ? opts.seed : default_seed();
    rep.samples = opts.samples;
    rep.candidates = candidates;
    std::vector<Compiled> cs;
    for (const auto& c : candidates) {
        if (c.dim() != oc.algebra().dim) throw Error(ErrorKind::Domain, "candidate dimension does not match the algebra");
        cs.push_back(compile(oc, c));
    }
    auto note = [&](double r) { rep.max_residual = std::max(rep.max_residual, r); };
    // pairwise
    for (std::size_t a = 0; a < cs.size(); ++a)
        for (std::size_t b = a + 1; b < cs.size(); ++b) {
            std::optional<AuditPair> hit;
            for (int dir = 0; dir < 2 && !hit; ++dir) {
                const Compiled& src = dir == 0 ? cs[a] : cs[b];
                const Compiled& dst = dir == 0 ? cs[b] : cs[a];
                for (const auto& m : samples_of(oc, src)) {
                    auto cov = cover(oc, dst, m.nf, m.vec);
                    if (!cov.match) continue;
                    AuditPair p;
                    p.a = a;
                    p.b = b;
                    const Member& ma = dir == 0 ? m : cov.match->m;
                    const Member& mb = dir == 0 ? cov.match->m : m;
                    p.member_a = ma.vec;
                    p.member_b = mb.vec;
                    p.witness = witness_between(oc, ma, mb);
                    note(p.witness.residual);
                    hit = p;
                    break;
                }
            }
            if (hit) rep.pairs.push_back(*hit);
        }
    // coverage
    struct Result {
        std::vector<Rational> d;
        std::vector<std::size_t> covering;
        bool decisive = true;
        std::string nf;
        double residual = 0;
    };
    std::vector<Result> results(opts.samples);
    std::mt19937_64 rng(rep.seed);
    for (auto& r : results) r.d = random_direction(rng, oc.algebra().dim);
    auto work = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            auto& r = results[i];
            NormalForm nf = oc.normal_form(r.d);
            r.residual = nf.residual;
            std::vector<double> dv;
            for (const auto& x : r.d) dv.push_back(x.get_d());
            for (std::size_t k = 0; k < cs.size(); ++k) {
                auto cov = cover(oc, cs[k], nf, dv);
                if (cov.match) r.covering.push_back(k);
                else if (!cov.decisive) r.decisive = false;
            }
            if (r.covering.empty()) r.nf = oc.describe(nf);
        }
    };
    unsigned jobs = std::max(1u, opts.jobs);
    if (jobs == 1 || opts.samples < 2) {
        work(0, opts.samples);
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (opts.samples + jobs - 1) / jobs;
        for (unsigned j = 0; j < jobs; ++j) {
            std::size_t lo = j * chunk, hi = std::min(opts.samples, lo + chunk);
            if (lo < hi) pool.emplace_back(work, lo, hi);
        }
        for (auto& t : pool) t.join();
    }
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        note(r.residual);
        if (r.residual > kTol) {
            ++rep.undecided;
            continue;
        }
        if (r.covering.empty()) {
            if (r.decisive) rep.gaps.push_back({i, r.d, r.nf});
            else ++rep.undecided;
        } else if (r.covering.size() > 1) {
            rep.duplicates.push_back({i, r.covering});
        }
    }
    return rep;
}

AuditReport verify_candidate_system(const QAlgebra& q, const std::vector<SubalgebraRep>& candidates,
                                    const AuditOptions& opts) {
    OrbitClassifier oc(q);
    return verify_candidate_system(oc, candidates, opts);
}

std::string AuditReport::render(const OrbitClassifier& c, const std::string& prefix) const {
    std::ostringstream o;
    o << "algebra: " << algebra << "\n";
    o << "seed: " << seed << "\n";
    o << "samples: " << samples << "\n";
    o << "candidates:\n";
    for (std::size_t i = 0; i < candidates.size(); ++i) o << "  " << i + 1 << ": " << candidates[i].render(prefix) << "\n";
    o << "pairs:\n";
    if (pairs.empty()) o << "  none\n";
    for (const auto& p : pairs) o << "  " << p.a + 1 << " ~ " << p.b + 1 << "\n";
    o << "gaps:\n";
    if (gaps.empty()) o << "  none\n";
    std::size_t shown = 0;
    for (const auto& g : gaps) {
        if (++shown > 10) {
            o << "  ... " << gaps.size() - 10 << " more\n";
            break;
        }
        o << "  sample " << g.sample << ": " << vec_text(g.direction) << " has " << g.normal_form << "\n";
    }
    o << "duplicates:\n";
    if (duplicates.empty()) o << "  none\n";
    shown = 0;
    for (const auto& d : duplicates) {
        if (++shown > 10) {
            o << "  ... " << duplicates.size() - 10 << " more\n";
            break;
        }
        o << "  sample " << d.sample << ": candidates";
        for (auto k : d.candidates) o << " " << k + 1;
        o << "\n";
    }
    o << "witnesses:\n";
    if (pairs.empty()) o << "  none\n";
    for (const auto& p : pairs) {
        o << "  " << p.a + 1 << " ~ " << p.b + 1 << ": " << vec_text(p.member_a) << " -> " << vec_text(p.member_b)
          << " via " << c.render_word(p.witness.word, prefix) << ", residual " << std::scientific << std::setprecision(2)
          << p.witness.residual << std::defaultfloat << "\n";
    }
    o << "gap count: " << gaps.size() << "\n";
    o << "duplicate count: " << duplicates.size() << "\n";
    o << "undecided: " << undecided << " (" << std::fixed << std::setprecision(2) << 100 * undecided_rate() << "%)\n";
    o << std::defaultfloat;
    return o.str();
}

} // namespace liesym
