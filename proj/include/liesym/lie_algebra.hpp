#pragma once

#include "liesym/jet.hpp"
#include "liesym/linalg.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace liesym {

/// [X, Y] with coefficients X(Y^a) - Y(X^a).
VectorField bracket(const VectorField& x, const VectorField& y);

/// Structure constants [e_i, e_j] = C(i,j,k) e_k, entries exact rationals or
/// expressions in declared parameters. basis is empty for abstract algebras.
struct LieAlgebra {
    std::size_t dim = 0;
    std::vector<Expr> c;
    std::vector<VectorField> basis;

    explicit LieAlgebra(std::size_t n = 0) : dim(n), c(n * n * n, Expr(0)) {}
    Expr& C(std::size_t i, std::size_t j, std::size_t k) { return c[(i * dim + j) * dim + k]; }
    const Expr& C(std::size_t i, std::size_t j, std::size_t k) const { return c[(i * dim + j) * dim + k]; }
    /// Sets [e_i, e_j] and the antisymmetric partner.
    void set(std::size_t i, std::size_t j, const std::vector<Expr>& v);
};

/// Expands all brackets of the basis in the basis. Throws NotClosed (with the
/// offending bracket) or DependentBasis.
LieAlgebra structure_constants(const std::vector<VectorField>& basis);
bool check_antisymmetry(const LieAlgebra& l);
/// Jacobi identity as canonical zero for every triple.
bool check_jacobi(const LieAlgebra& l);
LieAlgebra instantiate(const LieAlgebra& l, const std::map<std::string, Expr>& bindings);
/// Nonzero brackets "[X1,X3] = (-1 + m - 2*p)*X1 - X2", one per line.
std::string render_table(const LieAlgebra& l, const std::string& prefix = "X");

/// Rational structure constants with coordinate operations.
struct QAlgebra {
    std::size_t dim = 0;
    std::vector<Rational> c;

    explicit QAlgebra(std::size_t n = 0) : dim(n), c(n * n * n, Rational(0)) {}
    Rational& C(std::size_t i, std::size_t j, std::size_t k) { return c[(i * dim + j) * dim + k]; }
    const Rational& C(std::size_t i, std::size_t j, std::size_t k) const { return c[(i * dim + j) * dim + k]; }
    std::vector<Rational> bracket(const std::vector<Rational>& a, const std::vector<Rational>& b) const;
    /// Matrix of Y -> [X, Y]; columns are images of basis vectors.
    QMatrix ad(const std::vector<Rational>& x) const;
    bool operator==(const QAlgebra& o) const { return dim == o.dim && c == o.c; }
};

/// Throws Domain when some constant is not a rational number.
QAlgebra to_rational(const LieAlgebra& l);
LieAlgebra to_expr(const QAlgebra& q);
/// Constants of the basis f_i = sum_j w(j, i) e_j. Throws NonInvertible.
QAlgebra change_basis(const QAlgebra& q, const QMatrix& w);
/// Basis (as matrix columns) of the span of the given vectors.
QMatrix span(const std::vector<std::vector<Rational>>& vs, std::size_t dim);
QMatrix derived_algebra(const QAlgebra& q, const QMatrix& sub);
QMatrix center(const QAlgebra& q);
QMatrix killing_form(const QAlgebra& q);

struct AlgebraInvariants {
    std::size_t dim = 0;
    std::vector<std::size_t> derived_series;  // dims of L, L', L'', ... until stable
    std::vector<std::size_t> lower_central;   // dims of L, [L,L], [L,[L,L]], ...
    std::size_t center_dim = 0;
    std::size_t killing_rank = 0;
    int killing_positive = 0;
    int killing_negative = 0;
    bool abelian = false;
    bool solvable = false;
    bool nilpotent = false;
};
AlgebraInvariants algebra_invariants(const QAlgebra& q);
/// Signature counts of a symmetric rational matrix (positive, negative).
std::pair<int, int> signature(const QMatrix& sym);

struct AlgebraLabel {
    std::string name;               // catalog label, e.g. "A3,5^a"
    std::optional<Rational> param;  // normalized continuous parameter
    QMatrix witness;                // columns: catalog basis in the input basis
    std::string render() const;
};

/// Identifies against the catalog with a verified basis-change witness.
/// Throws Unidentified or UnsupportedClass.
AlgebraLabel identify(const QAlgebra& q);

} // namespace liesym
