#include "liesym/algebra_catalog.hpp"

#include "liesym/embedded_data.hpp"
#include "liesym/error.hpp"
#include "liesym/parser.hpp"

#include <sstream>

namespace liesym {

namespace {

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(trim(cur));
    return out;
}

std::vector<CatalogAlgebra> load() {
    std::vector<CatalogAlgebra> out;
    std::istringstream in{std::string(embedded::algebras_txt)};
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        // the range column may itself contain '|'
        auto f = split(line, '|');
        while (f.size() < 5) f.push_back("");
        for (std::size_t i = 5; i < f.size(); ++i) f[4] += "|" + f[i];
        CatalogAlgebra a{f[0], static_cast<std::size_t>(std::stoul(f[1])), f[2], f[3], f[4]};
        out.push_back(a);
    }
    std::vector<CatalogAlgebra> sums;
    for (const auto& a : out) {
        if (a.dim != 3 || a.label == "3A1" || a.label == "A2+A1") continue;
        sums.push_back({a.label + "+A1", 4, a.brackets, a.param, a.range});
    }
    out.insert(out.end(), sums.begin(), sums.end());
    return out;
}

} // namespace

const std::vector<CatalogAlgebra>& algebra_catalog() {
    static const std::vector<CatalogAlgebra> cat = load();
    return cat;
}

const CatalogAlgebra* find_algebra(const std::string& label) {
    for (const auto& a : algebra_catalog())
        if (a.label == label) return &a;
    return nullptr;
}

bool param_in_range(const CatalogAlgebra& a, const Rational& v) {
    if (a.range == "0<|a|<1") return v != 0 && abs(v) < 1;
    if (a.range == "b>0") return v > 0;
    if (a.range == "b>=0") return v >= 0;
    return true;
}

QAlgebra canonical_algebra(const std::string& label, std::optional<Rational> param) {
    const CatalogAlgebra* a = find_algebra(label);
    if (!a) throw Error(ErrorKind::Domain, "unknown algebra label '" + label + "'");
    if (!a->param.empty() && !param) throw Error(ErrorKind::Domain, label + " needs a value for " + a->param);
    if (a->param.empty() && param) throw Error(ErrorKind::Domain, label + " has no parameter");
    if (param && !param_in_range(*a, *param))
        throw Error(ErrorKind::Domain, label + ": " + a->param + " = " + render(*param) + " violates " + a->range);
    SymbolTable table;
    for (std::size_t k = 1; k <= a->dim; ++k) table.declare_variable("e" + std::to_string(k));
    if (!a->param.empty()) table.declare_parameter(a->param);
    QAlgebra q(a->dim);
    if (a->brackets.empty()) return q;
    for (const auto& item : split(a->brackets, ';')) {
        auto eq = item.find('=');
        if (item.size() < 7 || item[0] != '[' || eq == std::string::npos)
            throw Error(ErrorKind::Schema, "bad bracket '" + item + "' in algebra catalog");
        auto inner = split(item.substr(1, item.find(']') - 1), ',');
        std::size_t i = std::stoul(inner.at(0).substr(1)) - 1, j = std::stoul(inner.at(1).substr(1)) - 1;
        Expr rhs = parse(item.substr(eq + 1), table);
        if (param) rhs = substitute(rhs, {{a->param, Expr(*param)}});
        for (std::size_t k = 0; k < a->dim; ++k) {
            Expr ck = expand(differentiate(rhs, "e" + std::to_string(k + 1)));
            if (!ck.is_number()) throw Error(ErrorKind::Schema, "non-numeric constant in '" + item + "'");
            q.C(i, j, k) = ck.value();
            q.C(j, i, k) = -ck.value();
        }
    }
    return q;
}

} // namespace liesym
