#pragma once

#include "liesym/linalg.hpp"
#include "liesym/rational.hpp"

#include <string>
#include <vector>

namespace liesym {

/// Univariate polynomial over Q, coefficients in increasing degree.
class QPoly {
public:
    QPoly() = default;
    explicit QPoly(std::vector<Rational> c) : c_(std::move(c)) { trim(); }
    static QPoly constant(const Rational& v) { return QPoly({v}); }
    static QPoly monomial(const Rational& v, std::size_t k);

    int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
    bool is_zero() const { return c_.empty(); }
    const std::vector<Rational>& coeffs() const { return c_; }
    Rational coeff(std::size_t k) const { return k < c_.size() ? c_[k] : Rational(0); }
    Rational leading() const { return c_.empty() ? Rational(0) : c_.back(); }

    Rational operator()(const Rational& x) const;
    double eval(double x) const;
    QPoly operator+(const QPoly& o) const;
    QPoly operator-(const QPoly& o) const;
    QPoly operator*(const QPoly& o) const;
    QPoly scaled(const Rational& s) const;
    bool operator==(const QPoly& o) const { return c_ == o.c_; }
    QPoly derivative() const;
    QPoly monic() const;
    /// Euclidean division; throws on zero divisor.
    void divmod(const QPoly& d, QPoly& q, QPoly& r) const;

    std::string render(const std::string& var = "z") const;

private:
    void trim();
    std::vector<Rational> c_;
};

QPoly gcd(QPoly a, QPoly b);
/// Unique polynomial of degree < n through the n points.
QPoly interpolate(const std::vector<Rational>& xs, const std::vector<Rational>& ys);
/// Distinct rational roots with multiplicity.
std::vector<std::pair<Rational, int>> rational_roots(const QPoly& p);
/// det(z I - A), exact.
QPoly charpoly(const QMatrix& a);

} // namespace liesym
