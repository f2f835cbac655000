#include "liesym/jet.hpp"

#include "liesym/error.hpp"

namespace liesym {

std::string jet_name(int nt, int nx) {
    if (nt == 0 && nx == 0) return "u";
    return "u_" + std::string(nt, 't') + std::string(nx, 'x');
}

std::optional<std::pair<int, int>> parse_jet_name(const std::string& name) {
    if (name == "u") return std::make_pair(0, 0);
    if (name.size() < 3 || name[0] != 'u' || name[1] != '_') return std::nullopt;
    int nt = 0, nx = 0;
    std::size_t i = 2;
    while (i < name.size() && name[i] == 't') { ++nt; ++i; }
    while (i < name.size() && name[i] == 'x') { ++nx; ++i; }
    if (i != name.size()) return std::nullopt;
    return std::make_pair(nt, nx);
}

Expr jet(int nt, int nx) { return Expr::symbol(jet_name(nt, nx)); }

int jet_order(const Expr& e) {
    int best = 0;
    for (const auto& s : free_symbols(e)) {
        auto j = parse_jet_name(s);
        if (j) best = std::max(best, j->first + j->second);
    }
    return best;
}

Expr total_derivative(const Expr& e, char dir, int max_order) {
    if (dir != 't' && dir != 'x') throw Error(ErrorKind::Domain, "total derivative direction must be t or x");
    std::vector<Expr> terms;
    terms.push_back(differentiate(e, std::string(1, dir)));
    for (const auto& s : free_symbols(e)) {
        auto j = parse_jet_name(s);
        if (!j) continue;
        int nt = j->first + (dir == 't');
        int nx = j->second + (dir == 'x');
        Expr d = differentiate(e, s);
        if (d.is_zero()) continue;
        if (nt + nx > max_order)
            throw Error(ErrorKind::OrderOverflow, "D_" + std::string(1, dir) + " of " + s + " exceeds order " +
                                                      std::to_string(max_order));
        terms.push_back(mul({jet(nt, nx), d}));
    }
    return expand(add(terms));
}

VectorField operator+(const VectorField& a, const VectorField& b) {
    return {a.xi_t + b.xi_t, a.xi_x + b.xi_x, a.eta + b.eta};
}
VectorField operator-(const VectorField& a, const VectorField& b) {
    return {a.xi_t - b.xi_t, a.xi_x - b.xi_x, a.eta - b.eta};
}
VectorField operator*(const Expr& c, const VectorField& a) { return {c * a.xi_t, c * a.xi_x, c * a.eta}; }
bool operator==(const VectorField& a, const VectorField& b) {
    return a.xi_t == b.xi_t && a.xi_x == b.xi_x && a.eta == b.eta;
}
VectorField expand(const VectorField& v) { return {expand(v.xi_t), expand(v.xi_x), expand(v.eta)}; }
VectorField substitute(const VectorField& v, const std::map<std::string, Expr>& b) {
    return {substitute(v.xi_t, b), substitute(v.xi_x, b), substitute(v.eta, b)};
}
bool is_zero_field(const VectorField& v) {
    VectorField e = expand(v);
    return e.xi_t.is_zero() && e.xi_x.is_zero() && e.eta.is_zero();
}

std::string render(const VectorField& v) {
    std::string out;
    auto part = [&](const Expr& c, const char* d) {
        if (c.is_zero()) return;
        std::string coef;
        if (c.is_one()) coef = d;
        else if (c.is_add()) coef = "(" + render(c) + ")*" + d;
        else coef = render(c) + "*" + d;
        if (out.empty()) out = coef;
        else if (coef[0] == '-') out += " - " + coef.substr(1);
        else out += " + " + coef;
    };
    part(v.xi_t, "Dt");
    part(v.xi_x, "Dx");
    part(v.eta, "Du");
    return out.empty() ? "0" : out;
}

Expr apply(const VectorField& v, const Expr& f) {
    return expand(add({mul({v.xi_t, differentiate(f, "t")}), mul({v.xi_x, differentiate(f, "x")}),
                       mul({v.eta, differentiate(f, "u")})}));
}

ProlongedField prolong2(const VectorField& v) {
    for (const Expr* c : {&v.xi_t, &v.xi_x, &v.eta})
        if (jet_order(*c) > 0) throw Error(ErrorKind::Domain, "vector field coefficients must not contain jets");
    Expr q = expand(v.eta - v.xi_t * jet(1, 0) - v.xi_x * jet(0, 1));
    Expr qx = total_derivative(q, 'x', 3);
    ProlongedField p;
    p.base = v;
    p.eta_t = expand(total_derivative(q, 't', 3) + v.xi_t * jet(2, 0) + v.xi_x * jet(1, 1));
    p.eta_x = expand(qx + v.xi_t * jet(1, 1) + v.xi_x * jet(0, 2));
    p.eta_xx = expand(total_derivative(qx, 'x', 3) + v.xi_t * jet(1, 2) + v.xi_x * jet(0, 3));
    for (const Expr* c : {&p.eta_t, &p.eta_x, &p.eta_xx})
        if (jet_order(*c) > 2) throw Error(ErrorKind::OrderOverflow, "prolongation left third-order jets");
    return p;
}

} // namespace liesym
