#pragma once

#include "liesym/equivalence.hpp"
#include "liesym/jet.hpp"
#include "liesym/pde.hpp"

#include <string>
#include <vector>

namespace liesym {

/// X = (a0 + a1 t + a2 x) Dt + (b0 + b1 t + b2 x) Dx + c u Du.
struct AffineGenerator {
    Expr a0, a1, a2, b0, b1, b2, c;
};
/// Throws UnsupportedGenerator outside the class, DegenerateGenerator when
/// both xi components vanish (unless allowed, as for flows).
AffineGenerator affine_generator(const VectorField& x, bool allow_degenerate = false);

/// Invariant omega(t, x) and multiplier M(t, x) with X(omega) = 0 and
/// X(M) = c M, so u = M phi(omega) is an invariant ansatz.
struct GeneratorInvariants {
    Expr omega;
    Expr multiplier;
    // nonzero symbolic quantities the formulas divide by
    std::vector<Expr> assumptions;
    // t and x in terms of the transverse variable and w = omega
    std::string transverse;
    Expr t_of, x_of;
};
GeneratorInvariants generator_invariants(const VectorField& x);

/// phi, phi', phi'' as functions of the placeholder w.
Expr phi(int order);

struct ReductionAnsatz {
    VectorField generator;
    GeneratorInvariants invariants;
    Expr ode;       // in phi(w), phi'(w), phi''(w), w; leading coefficient 1
    Expr factor;    // depends on the transverse variable only
    Expr residual;  // the substituted PDE residual in (transverse, w)
    bool certificate = false;  // residual == factor * ode canonically
};
/// Throws NotASymmetry, or ReductionFailure with the residual.
ReductionAnsatz reduce_pde(const EvolutionPDE& pde, const VectorField& x);

/// u(t, x) = M phi(omega) for a closed-form phi(w).
Expr lift_solution(const ReductionAnsatz& r, const Expr& phi_of_w);

enum class SolutionStatus { Solution, NotSolution, Undecided };
const char* to_string(SolutionStatus s);
struct SolutionVerdict {
    SolutionStatus verdict = SolutionStatus::Undecided;
    Expr residual;  // u_t - F after substitution, expanded
};
SolutionVerdict verify_solution(const EvolutionPDE& pde, const Expr& u);

/// exp(eps X) as a point map: (t, x, u) -> (T, X, U) in terms of t, x, u, eps.
struct Flow {
    Expr t, x, u;
};
Flow flow(const VectorField& x, const Expr& eps);

/// Image of the graph u = sol(t, x) under exp(eps X): e^{c eps} sol(flow_{-eps}(t, x)).
Expr transform_solution(const Expr& sol, const VectorField& x, const Expr& eps);
/// Pullback through an equivalence transformation: given a solution of
/// apply_et(g, pde) in the starred variables, the solution of pde.
Expr transform_solution(const Expr& sol, const ET& g);

} // namespace liesym
