#pragma once

#include "liesym/jet.hpp"
#include "liesym/pde.hpp"

#include <string>
#include <vector>

namespace liesym {

enum class SymmetryStatus { Symmetry, NotSymmetry, Undecided };
const char* to_string(SymmetryStatus s);

struct SymmetryVerdict {
    SymmetryStatus verdict = SymmetryStatus::Undecided;
    Expr residual;  // canonical, after u_t -> F and u_tx -> D_x F
};

/// pr2 X (u_t - F) with u_t and u_tx eliminated, expanded.
Expr invariance_residual(const EvolutionPDE& pde, const VectorField& x);
SymmetryVerdict is_symmetry(const EvolutionPDE& pde, const VectorField& x);

struct FindOptions {
    int degree = 2;
    // also try xi, alpha, beta of the form exp(r t) * poly and exp(r x) * poly
    // for nonzero rational rates r
    bool exponential = false;
};

struct FindResult {
    std::vector<VectorField> generators;     // basis modulo the superposition part
    std::vector<VectorField> superposition;  // beta(t,x) d/du fields of linear equations
    std::vector<Rational> t_rates;           // exponential rates that contributed
    std::vector<Rational> x_rates;
    std::size_t unknowns = 0;
    std::size_t equations = 0;
};

/// Polynomial-ansatz symmetry search; every returned field is re-verified.
FindResult find_symmetries(const EvolutionPDE& pde, const FindOptions& opts = {});

/// A parameter value at which two u-exponents of the rhs coincide up to an
/// integer shift, so the generic splitting of determining equations changes.
struct ExponentBranch {
    std::string param;
    Expr value;
    std::string condition;  // "e1 = e2 + k"
};

/// Scans the symbolic rhs for exponent coincidences linear in one parameter.
std::vector<ExponentBranch> exponent_branches(const EvolutionPDE& pde);

} // namespace liesym
