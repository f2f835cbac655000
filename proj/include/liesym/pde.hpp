#pragma once

#include "liesym/expr.hpp"
#include "liesym/parser.hpp"

#include <map>
#include <optional>
#include <string>

namespace liesym {

/// u_t = rhs(t, x, u, u_x, u_xx).
struct EvolutionPDE {
    Expr rhs;
};

/// Validates the right-hand side (no u_t, u_tt, u_tx; order <= 2) and expands.
EvolutionPDE make_pde(const Expr& rhs);

/// u_t = (u^m)_xx + (b0 u + b1 u^(p+1))_x + (1 - u^p)(c0 + c1 u^p) u^(2-m).
/// Each parameter is an exact rational or a symbolic expression.
struct DCRInstance {
    Expr m = Expr::symbol("m");
    Expr p = Expr::symbol("p");
    Expr b0 = Expr::symbol("b0");
    Expr b1 = Expr::symbol("b1");
    Expr c0 = Expr::symbol("c0");
    Expr c1 = Expr::symbol("c1");
};

bool operator==(const DCRInstance& a, const DCRInstance& b);

/// u_t = [A(u) u_x]_x + B(u) u_x + C(u).
struct DCRFamilyMember {
    Expr A;
    Expr B;
    Expr C;
};

struct DCRFlags {
    bool special_case = false;        // p + 1 = m and c0 = 0
    bool drift_removable = false;     // b0 != 0
    bool pure_convection_diffusion = false;  // c0 = c1 = 0
    bool linear_diffusion = false;    // m = 1
    bool p_zero = false;              // p = 0
};

EvolutionPDE build_dcr(const DCRInstance& inst);
DCRFamilyMember to_family(const EvolutionPDE& pde);
DCRFlags special_case_flags(const DCRInstance& inst);
std::string render(const DCRFlags& flags);

/// Recovers (b0, b1, c0, c1) from a PDE for given exponents, or nullopt when
/// the PDE is not a family member with these exponents.
std::optional<DCRInstance> match_dcr(const EvolutionPDE& pde, const Expr& m, const Expr& p);

/// Flat record "m=2,p=1,b0=0,b1=1,c0=0,c1=0" with exact rationals as num/den.
std::string serialize(const DCRInstance& inst);
/// Parses a flat record; missing keys default to 0 (exponents default to
/// symbolic m and p).
DCRInstance parse_dcr(const std::string& record, const SymbolTable& symbols);
std::map<std::string, Expr> to_map(const DCRInstance& inst);

} // namespace liesym
