#pragma once

#include "liesym/rational.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace liesym {

enum class Kind { Number, Symbol, Func, Pow, Mul, Add };

struct Node;

/// Immutable expression handle. Every constructor returns the canonical form
/// at construction level: sums and products are flattened, sorted and merged,
/// powers of powers collapse, numeric sub-expressions fold. Distribution of
/// products over sums is left to expand().
class Expr {
public:
    Expr();
    Expr(int n);
    Expr(long n);
    Expr(const Rational& q);

    static Expr symbol(const std::string& name);

    Kind kind() const;
    bool is_number() const { return kind() == Kind::Number; }
    bool is_symbol() const { return kind() == Kind::Symbol; }
    bool is_add() const { return kind() == Kind::Add; }
    bool is_mul() const { return kind() == Kind::Mul; }
    bool is_pow() const { return kind() == Kind::Pow; }
    bool is_func() const { return kind() == Kind::Func; }
    bool is_zero() const;
    bool is_one() const;
    bool is_func(const std::string& fname) const;

    // Number value, Mul coefficient, or Add constant term.
    const Rational& value() const;
    const Rational& coeff() const { return value(); }
    // Symbol or function name.
    const std::string& name() const;
    // Derivative order tag of an opaque function application.
    int order() const;
    // Add terms, Mul factors, {base, exponent} for Pow, {arg} for Func.
    const std::vector<Expr>& args() const;
    const Expr& base() const;
    const Expr& exponent() const;
    const Expr& arg() const;

    std::size_t hash() const;
    const Node* ptr() const { return node_.get(); }

private:
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
    friend struct Build;
};

/// Deterministic total order on (kind, name, children).
int compare(const Expr& a, const Expr& b);
bool operator==(const Expr& a, const Expr& b);
inline bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }
struct ExprLess {
    bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

Expr add(const std::vector<Expr>& terms);
Expr mul(const std::vector<Expr>& factors);
Expr pow(const Expr& base, const Expr& exponent);
Expr exp(const Expr& arg);
Expr log(const Expr& arg);
/// Opaque unary function with derivative-order tag (phi, phi', phi'').
Expr func(const std::string& name, int order, const Expr& arg);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr& operator+=(Expr& a, const Expr& b);
Expr& operator-=(Expr& a, const Expr& b);
Expr& operator*=(Expr& a, const Expr& b);

/// Deterministic ASCII form; parse(render(e)) == e.
std::string render(const Expr& e);

/// Full expansion plus canonicalization.
Expr expand(const Expr& e);
inline Expr simplify(const Expr& e) { return expand(e); }

Expr differentiate(const Expr& e, const std::string& sym);
Expr differentiate(const Expr& e, const std::string& sym, int order);

/// Simultaneous substitution, canonical at construction level.
Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings);

std::set<std::string> free_symbols(const Expr& e);
bool depends_on(const Expr& e, const std::string& sym);
bool depends_on_any(const Expr& e, const std::set<std::string>& syms);

/// Split a term into rational coefficient and coefficient-free remainder.
std::pair<Rational, Expr> split_coeff(const Expr& term);
/// Split a factor into base and exponent (exponent 1 for non-powers).
std::pair<Expr, Expr> split_pow(const Expr& factor);
/// Terms of a sum (a non-sum is a one-term list; the constant term is included
/// as a Number when nonzero).
std::vector<Expr> terms_of(const Expr& e);
/// Factors of a product including the numeric coefficient when it is not 1.
std::vector<Expr> factors_of(const Expr& e);

struct EvalContext {
    std::function<std::optional<Rational>(const std::string&)> symbol;
    // value of an opaque function application at a given evaluated argument
    std::function<std::optional<Rational>(const std::string&, int, const Rational&)> opaque;
};

/// Exact evaluation; nullopt when a value is not rational (irrational roots,
/// exp/log of nonzero/non-one arguments, unbound symbols, division by zero).
std::optional<Rational> evaluate(const Expr& e, const EvalContext& ctx);
std::optional<Rational> evaluate(const Expr& e, const std::map<std::string, Rational>& point);

enum class ZeroVerdict { Zero, NonZero, Undecided };
const char* to_string(ZeroVerdict v);

struct ZeroTestOptions {
    // Symbols sampled as free variables; anything else is treated as a
    // parameter and sampled among integers in [2, 97].
    std::set<std::string> variables = {"t", "x", "u", "w"};
    bool jet_names_are_variables = true;   // u_t, u_xx, ...
    std::uint64_t seed = 0x6c69657379ULL;
    int points = 3;
};

ZeroVerdict is_zero(const Expr& e, const ZeroTestOptions& opts = {});

/// Lcm of denominators of all numeric exponents occurring in e.
Integer exponent_denominator_lcm(const Expr& e);

} // namespace liesym
