#pragma once

#include "liesym/expr.hpp"

#include <optional>
#include <string>
#include <utility>

namespace liesym {

/// Name of the jet coordinate with nt time and nx space derivatives:
/// (0,0) -> "u", (1,0) -> "u_t", (1,1) -> "u_tx", (0,2) -> "u_xx".
std::string jet_name(int nt, int nx);
std::optional<std::pair<int, int>> parse_jet_name(const std::string& name);
Expr jet(int nt, int nx);

/// Highest derivative order among jet symbols in e (0 if only u or none).
int jet_order(const Expr& e);

/// Total derivative D_t (dir 't') or D_x (dir 'x'). Throws OrderOverflow if
/// the result would contain jets above max_order.
Expr total_derivative(const Expr& e, char dir, int max_order = 2);

/// Point-symmetry generator xi_t d/dt + xi_x d/dx + eta d/du.
struct VectorField {
    Expr xi_t;
    Expr xi_x;
    Expr eta;
};

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(const Expr& c, const VectorField& a);
bool operator==(const VectorField& a, const VectorField& b);
VectorField expand(const VectorField& v);
VectorField substitute(const VectorField& v, const std::map<std::string, Expr>& bindings);
bool is_zero_field(const VectorField& v);

/// Renders as "a*Dt + b*Dx + c*Du", omitting zero components.
std::string render(const VectorField& v);

/// Applies the field as a derivation to a function of (t, x, u).
Expr apply(const VectorField& v, const Expr& f);

struct ProlongedField {
    VectorField base;
    Expr eta_t;
    Expr eta_x;
    Expr eta_xx;
};

ProlongedField prolong2(const VectorField& v);

} // namespace liesym
