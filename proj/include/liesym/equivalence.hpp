#pragma once

#include "liesym/jet.hpp"
#include "liesym/pde.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace liesym {

/// t* = k0 t + d0, x* = k1 x + g t + d1, u* = k2 u + d2.
struct EquivalenceTransformation {
    Expr k0 = Expr(1), k1 = Expr(1), k2 = Expr(1);
    Expr g = Expr(0);
    Expr d0 = Expr(0), d1 = Expr(0), d2 = Expr(0);

    static EquivalenceTransformation identity() { return {}; }
    static EquivalenceTransformation boost(const Expr& g);
    static EquivalenceTransformation scaling(const Expr& k0, const Expr& k1, const Expr& k2);
};
using ET = EquivalenceTransformation;

bool operator==(const ET& a, const ET& b);
/// Throws NonInvertible when some k is literally zero.
void check_invertible(const ET& g);
/// Ordered as (k0, k1, k2, g, d0, d1, d2).
std::array<Expr, 7> params(const ET& g);
ET from_params(const std::array<Expr, 7>& p);
std::string render(const ET& g);

/// The PDE in the starred variables (stars dropped).
EvolutionPDE apply_et(const ET& g, const EvolutionPDE& pde);
/// (outer o inner): applying the result equals applying inner then outer.
ET compose(const ET& outer, const ET& inner);
ET invert(const ET& g);
/// X written in the starred coordinates.
VectorField pushforward(const ET& g, const VectorField& x);
/// Instance-level action; requires d2 = 0 and rational or symbolic (m, p).
std::optional<DCRInstance> apply_et(const ET& g, const DCRInstance& inst);

struct DriftRemoval {
    DCRInstance instance;
    ET witness;
};
DriftRemoval remove_drift(const DCRInstance& inst);

enum class Coefficient { b1, c0, c1 };
std::optional<Coefficient> parse_coefficient(const std::string& name);
const char* to_string(Coefficient c);

struct Normalization {
    DCRInstance instance;
    ET witness;
    // target values reachable with some sign pattern of (k0, k1, k2)
    std::vector<int> reachable_signs;
    std::string system;  // the matching equations, for reports
};
/// Scales the target coefficient to +1 or -1 (sign of the input kept when
/// only positive scalings are used). Throws NoScaling when inconsistent.
Normalization normalize_coefficient(const DCRInstance& inst, Coefficient target);

enum class EquivalenceStatus { Equivalent, NotEquivalent, Undecided };
const char* to_string(EquivalenceStatus s);
struct EquivalenceVerdict {
    EquivalenceStatus verdict = EquivalenceStatus::Undecided;
    std::optional<ET> witness;  // maps a to b
    std::string reason;
};
EquivalenceVerdict are_equivalent(const DCRInstance& a, const DCRInstance& b);

} // namespace liesym
