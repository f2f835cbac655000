#include "liesym/poly.hpp"

#include "liesym/error.hpp"

#include <algorithm>
#include <set>

namespace liesym {

void QPoly::trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

QPoly QPoly::monomial(const Rational& v, std::size_t k) {
    std::vector<Rational> c(k + 1, Rational(0));
    c[k] = v;
    return QPoly(c);
}

Rational QPoly::operator()(const Rational& x) const {
    Rational r = 0;
    for (std::size_t i = c_.size(); i-- > 0;) r = r * x + c_[i];
    return r;
}

double QPoly::eval(double x) const {
    double r = 0;
    for (std::size_t i = c_.size(); i-- > 0;) r = r * x + c_[i].get_d();
    return r;
}

QPoly QPoly::operator+(const QPoly& o) const {
    std::vector<Rational> c(std::max(c_.size(), o.c_.size()), Rational(0));
    for (std::size_t i = 0; i < c_.size(); ++i) c[i] += c_[i];
    for (std::size_t i = 0; i < o.c_.size(); ++i) c[i] += o.c_[i];
    return QPoly(c);
}

QPoly QPoly::operator-(const QPoly& o) const { return *this + o.scaled(-1); }

QPoly QPoly::operator*(const QPoly& o) const {
    if (is_zero() || o.is_zero()) return QPoly();
    std::vector<Rational> c(c_.size() + o.c_.size() - 1, Rational(0));
    for (std::size_t i = 0; i < c_.size(); ++i)
        for (std::size_t j = 0; j < o.c_.size(); ++j) c[i + j] += c_[i] * o.c_[j];
    return QPoly(c);
}

QPoly QPoly::scaled(const Rational& s) const {
    std::vector<Rational> c = c_;
    for (auto& v : c) v *= s;
    return QPoly(c);
}

QPoly QPoly::derivative() const {
    if (c_.size() <= 1) return QPoly();
    std::vector<Rational> c(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) c[i - 1] = c_[i] * Rational(static_cast<long>(i));
    return QPoly(c);
}

QPoly QPoly::monic() const {
    if (is_zero()) return *this;
    return scaled(1 / leading());
}

void QPoly::divmod(const QPoly& d, QPoly& q, QPoly& r) const {
    if (d.is_zero()) throw Error(ErrorKind::Domain, "polynomial division by zero");
    std::vector<Rational> rem = c_;
    int dd = d.degree();
    std::vector<Rational> quo(std::max(0, degree() - dd + 1), Rational(0));
    Rational lead = d.leading();
    for (int k = degree(); k >= dd; --k) {
        Rational f = rem[k] / lead;
        if (f == 0) continue;
        quo[k - dd] = f;
        for (int j = 0; j <= dd; ++j) rem[k - dd + j] -= f * d.c_[j];
    }
    q = QPoly(quo);
    r = QPoly(rem);
}

std::string QPoly::render(const std::string& var) const {
    if (is_zero()) return "0";
    std::string out;
    for (std::size_t i = c_.size(); i-- > 0;) {
        if (c_[i] == 0) continue;
        if (!out.empty()) out += " + ";
        out += liesym::render(c_[i]);
        if (i >= 1) out += "*" + var;
        if (i >= 2) out += "^" + std::to_string(i);
    }
    return out;
}

QPoly gcd(QPoly a, QPoly b) {
    while (!b.is_zero()) {
        QPoly q, r;
        a.divmod(b, q, r);
        a = b;
        b = r;
    }
    return a.monic();
}

QPoly interpolate(const std::vector<Rational>& xs, const std::vector<Rational>& ys) {
    // Newton divided differences
    std::size_t n = xs.size();
    std::vector<Rational> dd = ys;
    for (std::size_t j = 1; j < n; ++j)
        for (std::size_t i = n - 1; i >= j; --i) {
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - j]);
            if (i == j) break;
        }
    QPoly p;
    for (std::size_t i = n; i-- > 0;) p = p * QPoly({-xs[i], Rational(1)}) + QPoly::constant(dd[i]);
    return p;
}

namespace {

std::vector<mpz_class> divisors(const mpz_class& n) {
    mpz_class a = abs(n);
    std::vector<mpz_class> out;
    if (a == 0) return out;
    std::map<Integer, long> fac;
    if (!try_factorize(a, fac)) throw Error(ErrorKind::Domain, "coefficient too large to factor");
    out.push_back(1);
    for (const auto& [pr, e] : fac) {
        std::size_t cur = out.size();
        mpz_class pk = 1;
        for (long k = 1; k <= e; ++k) {
            pk *= pr;
            for (std::size_t i = 0; i < cur; ++i) out.push_back(out[i] * pk);
        }
    }
    return out;
}

} // namespace

std::vector<std::pair<Rational, int>> rational_roots(const QPoly& p0) {
    std::vector<std::pair<Rational, int>> out;
    if (p0.degree() <= 0) return out;
    QPoly p = p0;
    int zero_mult = 0;
    while (!p.is_zero() && p.coeff(0) == 0) {
        p = QPoly(std::vector<Rational>(p.coeffs().begin() + 1, p.coeffs().end()));
        ++zero_mult;
    }
    if (zero_mult) out.push_back({Rational(0), zero_mult});
    if (p.degree() <= 0) return out;
    // clear denominators to an integer polynomial
    mpz_class l = 1;
    for (const auto& c : p.coeffs()) l = lcm(l, mpz_class(c.get_den()));
    std::vector<mpz_class> ic;
    for (const auto& c : p.coeffs()) ic.push_back(mpz_class(c * l));
    auto cand_num = divisors(ic.front());
    auto cand_den = divisors(ic.back());
    std::set<Rational> seen;
    for (const auto& a : cand_num)
        for (const auto& b : cand_den)
            for (int s : {1, -1}) {
                Rational r(a * s, b);
                r.canonicalize();
                if (!seen.insert(r).second) continue;
                int mult = 0;
                QPoly cur = p;
                for (;;) {
                    if (cur(r) != 0) break;
                    QPoly q, rem;
                    cur.divmod(QPoly({-r, Rational(1)}), q, rem);
                    cur = q;
                    ++mult;
                }
                if (mult) out.push_back({r, mult});
            }
    std::sort(out.begin(), out.end());
    return out;
}

QPoly charpoly(const QMatrix& a) {
    std::size_t n = a.rows();
    std::vector<Rational> xs, ys;
    for (std::size_t k = 0; k <= n; ++k) {
        Rational z(static_cast<long>(k));
        QMatrix m = QMatrix::identity(n).scaled(z) - a;
        xs.push_back(z);
        ys.push_back(m.determinant());
    }
    return interpolate(xs, ys);
}

} // namespace liesym
