#pragma once

#include "liesym/expr.hpp"
#include "liesym/lie_algebra.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace liesym {

using ExprMatrix = std::vector<std::vector<Expr>>;

struct AdjointMatrix {
    bool closed_form = false;
    ExprMatrix exact;         // entries in eps, set when closed_form
    Eigen::MatrixXd numeric;  // set whenever eps is a number
};

/// Ad(exp(eps X)) = exp(eps ad X). Closed form (Hermite interpolation of exp
/// at the eigenvalues) when the spectrum of ad X is rational, otherwise
/// numeric; a symbolic eps then throws Domain.
AdjointMatrix adjoint_matrix(const QAlgebra& q, const std::vector<Rational>& x, const Expr& eps);
AdjointMatrix adjoint_matrix(const QAlgebra& q, std::size_t i, const Expr& eps);

/// exp(eps a) entrywise in eps when the spectrum of a is rational.
std::optional<ExprMatrix> closed_form_exp(const QMatrix& a, const Expr& eps);

bool is_nilpotent(const QMatrix& a);
/// exp(t a) for nilpotent a, exact. Throws Domain otherwise.
QMatrix exp_nilpotent(const QMatrix& a, const Rational& t);

Eigen::MatrixXd to_eigen(const QMatrix& a);
Eigen::VectorXd to_eigen(const std::vector<Rational>& v);
Eigen::MatrixXd expm(const Eigen::MatrixXd& a);

ExprMatrix multiply(const ExprMatrix& a, const ExprMatrix& b);
ExprMatrix substitute(const ExprMatrix& m, const std::map<std::string, Expr>& bindings);
std::string render(const ExprMatrix& m);

} // namespace liesym
