#pragma once

#include "liesym/expr.hpp"
#include "liesym/jet.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>

namespace liesym {

class SymbolTable {
public:
    enum class Role { Variable, Jet, Parameter };

    /// t, x, u, the jets up to order 2, parameters m p b0 b1 c0 c1,
    /// the reduced variable w and the opaque function phi.
    static SymbolTable standard();

    void declare_variable(const std::string& name);
    void declare_jet(int nt, int nx);
    void declare_parameter(const std::string& name, std::optional<Rational> value = std::nullopt);
    void declare_function(const std::string& name);
    void assign(const std::string& param, const Rational& value);

    bool declared(const std::string& name) const { return roles_.count(name) > 0; }
    std::optional<Role> role(const std::string& name) const;
    bool is_function(const std::string& name) const { return functions_.count(name) > 0; }
    std::map<std::string, Expr> assignments() const;
    std::set<std::string> parameters() const;

private:
    std::map<std::string, Role> roles_;
    std::map<std::string, std::pair<int, int>> jets_;
    std::map<std::string, std::optional<Rational>> params_;
    std::set<std::string> functions_;
};

/// Parses the input DSL: identifiers, integers and decimals, + - * / ^,
/// parentheses, exp(), log(), declared opaque functions with primes (phi''(w)),
/// and D(expr, var[, order]) which is the total derivative for var in {t, x}
/// and the partial derivative otherwise. Assigned parameters are substituted.
Expr parse(const std::string& text, const SymbolTable& symbols);

/// Parses "a*Dt + b*Dx + c*Du"; the result must be linear in Dt, Dx, Du.
VectorField parse_field(const std::string& text, const SymbolTable& symbols);

/// Parses "u_t = rhs" (or just rhs) and returns rhs.
Expr parse_evolution_rhs(const std::string& text, const SymbolTable& symbols);

/// Parses "name=value,name2,..." into the table (bare names declare symbolic
/// parameters).
void parse_params(const std::string& text, SymbolTable& symbols);

} // namespace liesym
