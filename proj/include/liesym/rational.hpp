#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace liesym {

using Rational = mpq_class;
using Integer = mpz_class;

/// Parses "a", "-a", "a/b" or a finite decimal "1.25" into an exact rational.
Rational parse_rational(const std::string& text);

/// Renders as "num/den", or "num" when the denominator is 1.
std::string render(const Rational& q);

bool is_integer(const Rational& q);

/// n/d in lowest terms (mpq_class(n, d) leaves the fraction as given).
inline Rational make_rational(long n, long d) {
    Rational q(n, d);
    q.canonicalize();
    return q;
}

/// Exact integer power; exponent may be negative (base must then be nonzero).
Rational rational_pow(const Rational& base, long exponent);

/// Exact k-th root if it exists (odd k admits negative values).
std::optional<Rational> rational_root(const Rational& q, unsigned long k);

/// Trial-division factorization of |n|; returns prime -> multiplicity.
/// Throws if n has a prime factor above the trial bound.
std::map<Integer, long> factorize(const Integer& n);
bool try_factorize(const Integer& n, std::map<Integer, long>& out);

Integer lcm(const Integer& a, const Integer& b);

double to_double(const Rational& q);

/// Best rational approximation with denominator at most max_den.
Rational rational_approx(double v, long max_den);

} // namespace liesym
