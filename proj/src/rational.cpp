#include "liesym/rational.hpp"

#include "liesym/error.hpp"

#include <cmath>

namespace liesym {

const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Syntax: return "syntax error";
    case ErrorKind::UndeclaredSymbol: return "undeclared symbol";
    case ErrorKind::OrderOverflow: return "order overflow";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::NotInFamily: return "not-in-family";
    case ErrorKind::NonInvertible: return "non-invertible transformation";
    case ErrorKind::NoScaling: return "no-scaling-exists";
    case ErrorKind::NotClosed: return "not-closed";
    case ErrorKind::DependentBasis: return "dependent-basis";
    case ErrorKind::Unidentified: return "unidentified";
    case ErrorKind::UnsupportedClass: return "unsupported-class";
    case ErrorKind::UnsupportedCoefficients: return "unsupported-coefficients";
    case ErrorKind::UnsupportedGenerator: return "unsupported-generator";
    case ErrorKind::DegenerateGenerator: return "degenerate-generator";
    case ErrorKind::NotASymmetry: return "not-a-symmetry";
    case ErrorKind::ReductionFailure: return "reduction-failure";
    case ErrorKind::ImplicitResult: return "implicit-result";
    case ErrorKind::Schema: return "schema violation";
    case ErrorKind::Usage: return "usage error";
    }
    return "error";
}

Rational parse_rational(const std::string& text) {
    std::string s = text;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    size_t start = 0;
    while (start < s.size() && std::isspace(static_cast<unsigned char>(s[start]))) ++start;
    s = s.substr(start);
    if (s.empty()) throw Error(ErrorKind::Syntax, "empty rational");
    auto dot = s.find('.');
    if (dot != std::string::npos) {
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        size_t frac = s.size() - dot - 1;
        Integer num;
        if (num.set_str(digits, 10) != 0) throw Error(ErrorKind::Syntax, "bad decimal '" + text + "'");
        Integer den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, frac);
        Rational q(num, den);
        q.canonicalize();
        return q;
    }
    Rational q;
    if (q.set_str(s, 10) != 0) throw Error(ErrorKind::Syntax, "bad rational '" + text + "'");
    if (q.get_den() == 0) throw Error(ErrorKind::Domain, "zero denominator in '" + text + "'");
    q.canonicalize();
    return q;
}

std::string render(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

bool is_integer(const Rational& q) { return q.get_den() == 1; }

Rational rational_pow(const Rational& base, long exponent) {
    if (exponent == 0) return Rational(1);
    if (base == 0) {
        if (exponent < 0) throw Error(ErrorKind::Domain, "division by zero");
        return Rational(0);
    }
    unsigned long e = static_cast<unsigned long>(exponent < 0 ? -exponent : exponent);
    Integer n, d;
    mpz_pow_ui(n.get_mpz_t(), base.get_num().get_mpz_t(), e);
    mpz_pow_ui(d.get_mpz_t(), base.get_den().get_mpz_t(), e);
    Rational r = exponent < 0 ? Rational(d, n) : Rational(n, d);
    r.canonicalize();
    return r;
}

std::optional<Rational> rational_root(const Rational& q, unsigned long k) {
    if (k == 1) return q;
    if (q < 0 && k % 2 == 0) return std::nullopt;
    Integer n = abs(q.get_num());
    Integer rn, rd;
    if (mpz_root(rn.get_mpz_t(), n.get_mpz_t(), k) == 0) return std::nullopt;
    if (mpz_root(rd.get_mpz_t(), q.get_den().get_mpz_t(), k) == 0) return std::nullopt;
    Rational r(rn, rd);
    r.canonicalize();
    if (q < 0) r = -r;
    return r;
}

bool try_factorize(const Integer& n, std::map<Integer, long>& out) {
    out.clear();
    Integer m = abs(n);
    if (m <= 1) return true;
    for (unsigned long p : {2ul, 3ul, 5ul}) {
        while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
            out[Integer(p)] += 1;
            m /= p;
        }
    }
    // 6k +- 1 wheel up to the trial bound
    const unsigned long bound = 2000000;
    for (unsigned long p = 7, step = 4; p <= bound; p += step, step = 6 - step) {
        if (Integer(p) * p > m) break;
        while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
            out[Integer(p)] += 1;
            m /= p;
        }
    }
    if (m > 1) {
        if (mpz_probab_prime_p(m.get_mpz_t(), 30) == 0) return false;
        out[m] += 1;
    }
    return true;
}

std::map<Integer, long> factorize(const Integer& n) {
    std::map<Integer, long> out;
    if (!try_factorize(n, out)) throw Error(ErrorKind::Domain, "integer too hard to factor: " + n.get_str());
    return out;
}

Integer lcm(const Integer& a, const Integer& b) {
    Integer r;
    mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

double to_double(const Rational& q) { return q.get_d(); }

Rational rational_approx(double v, long max_den) {
    // continued fraction convergents
    bool neg = v < 0;
    double x = std::fabs(v);
    Integer h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    for (int i = 0; i < 64; ++i) {
        double a = std::floor(x);
        Integer ai(a);
        Integer h2 = ai * h1 + h0;
        Integer k2 = ai * k1 + k0;
        if (k2 > max_den) break;
        h0 = h1; h1 = h2; k0 = k1; k1 = k2;
        double f = x - a;
        if (f < 1e-15) break;
        x = 1.0 / f;
    }
    if (k1 == 0) return Rational(0);
    Rational r(h1, k1);
    r.canonicalize();
    return neg ? Rational(-r) : r;
}

} // namespace liesym
