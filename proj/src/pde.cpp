#include "liesym/pde.hpp"

#include "liesym/error.hpp"
#include "liesym/jet.hpp"

namespace liesym {

namespace {

const Expr U = Expr::symbol("u");
const Expr UX = Expr::symbol("u_x");
const Expr UXX = Expr::symbol("u_xx");

bool literal_zero(const Expr& e) { return is_zero(e) == ZeroVerdict::Zero; }

} // namespace

EvolutionPDE make_pde(const Expr& rhs) {
    for (const auto& s : free_symbols(rhs)) {
        auto j = parse_jet_name(s);
        if (!j) continue;
        if (j->first > 0) throw Error(ErrorKind::Domain, "right-hand side must not contain " + s);
        if (j->second > 2) throw Error(ErrorKind::OrderOverflow, "right-hand side contains " + s);
    }
    return {expand(rhs)};
}

bool operator==(const DCRInstance& a, const DCRInstance& b) {
    return expand(a.m) == expand(b.m) && expand(a.p) == expand(b.p) && expand(a.b0) == expand(b.b0) &&
           expand(a.b1) == expand(b.b1) && expand(a.c0) == expand(b.c0) && expand(a.c1) == expand(b.c1);
}

EvolutionPDE build_dcr(const DCRInstance& in) {
    if (literal_zero(in.m)) throw Error(ErrorKind::Domain, "m = 0 removes the diffusion term");
    const Expr& m = in.m;
    const Expr& p = in.p;
    Expr diffusion = m * pow(U, m - Expr(1)) * UXX + m * (m - Expr(1)) * pow(U, m - Expr(2)) * pow(UX, Expr(2));
    Expr convection = in.b0 * UX + in.b1 * (p + Expr(1)) * pow(U, p) * UX;
    Expr reaction = (Expr(1) - pow(U, p)) * (in.c0 + in.c1 * pow(U, p)) * pow(U, Expr(2) - m);
    return make_pde(diffusion + convection + reaction);
}

DCRFamilyMember to_family(const EvolutionPDE& pde) {
    Expr rhs = expand(pde.rhs);
    for (const auto& s : free_symbols(rhs)) {
        auto j = parse_jet_name(s);
        if (j && j->first > 0) throw Error(ErrorKind::NotInFamily, "rhs contains " + s);
        if (s == "t" || s == "x") throw Error(ErrorKind::NotInFamily, "rhs depends on " + s);
    }
    Expr A = expand(differentiate(rhs, "u_xx"));
    if (depends_on_any(A, {"u_x", "u_xx"})) throw Error(ErrorKind::NotInFamily, "rhs is not linear in u_xx");
    if (literal_zero(A)) throw Error(ErrorKind::NotInFamily, "no diffusion term");
    Expr R = expand(rhs - A * UXX);
    Expr d1 = differentiate(R, "u_x");
    Expr C = expand(substitute(R, {{"u_x", Expr(0)}}));
    Expr B = expand(substitute(d1, {{"u_x", Expr(0)}}));
    Expr Q = expand(differentiate(d1, "u_x") / Expr(2));
    if (depends_on(Q, "u_x")) throw Error(ErrorKind::NotInFamily, "rhs is not quadratic in u_x");
    if (!literal_zero(R - Q * pow(UX, Expr(2)) - B * UX - C))
        throw Error(ErrorKind::NotInFamily, "rhs does not match A u_xx + A' u_x^2 + B u_x + C");
    if (!literal_zero(Q - differentiate(A, "u")))
        throw Error(ErrorKind::NotInFamily, "coefficient of u_x^2 is not A'(u)");
    return {A, B, C};
}

DCRFlags special_case_flags(const DCRInstance& in) {
    DCRFlags f;
    bool c0_zero = literal_zero(in.c0);
    bool c1_zero = literal_zero(in.c1);
    f.special_case = literal_zero(in.p + Expr(1) - in.m) && c0_zero;
    f.drift_removable = !literal_zero(in.b0);
    f.pure_convection_diffusion = c0_zero && c1_zero;
    f.linear_diffusion = literal_zero(in.m - Expr(1));
    f.p_zero = literal_zero(in.p);
    return f;
}

std::string render(const DCRFlags& f) {
    std::string out;
    auto add_flag = [&](bool on, const char* name) {
        if (!on) return;
        if (!out.empty()) out += ",";
        out += name;
    };
    add_flag(f.special_case, "special-case(p+1=m,c0=0)");
    add_flag(f.drift_removable, "drift-removable");
    add_flag(f.pure_convection_diffusion, "pure-convection-diffusion");
    add_flag(f.linear_diffusion, "linear-diffusion(m=1)");
    add_flag(f.p_zero, "p=0");
    return out.empty() ? "none" : out;
}

namespace {

// groups the terms of a polynomial in powers of u by exponent
std::map<Expr, Expr, ExprLess> group_by_u_power(const Expr& e) {
    std::map<Expr, std::vector<Expr>, ExprLess> acc;
    for (const auto& t : terms_of(expand(e))) {
        Expr k = Expr(0);
        std::vector<Expr> rest;
        for (const auto& f : factors_of(t)) {
            auto [b, x] = split_pow(f);
            if (b.is_symbol() && b.name() == "u") k = k + x;
            else rest.push_back(f);
        }
        acc[expand(k)].push_back(mul(rest));
    }
    std::map<Expr, Expr, ExprLess> out;
    for (auto& [k, ts] : acc) out[k] = expand(add(ts));
    return out;
}

} // namespace

std::optional<DCRInstance> match_dcr(const EvolutionPDE& pde, const Expr& m, const Expr& p) {
    DCRFamilyMember fam;
    try {
        fam = to_family(pde);
    } catch (const Error&) {
        return std::nullopt;
    }
    if (!literal_zero(fam.A - m * pow(U, m - Expr(1)))) return std::nullopt;
    Expr e0 = Expr(0), ep = expand(p);
    Expr r0 = expand(Expr(2) - m), r1 = expand(p + Expr(2) - m), r2 = expand(Expr(2) * p + Expr(2) - m);
    if (e0 == ep || r0 == r1 || r1 == r2 || r0 == r2) return std::nullopt;
    auto b = group_by_u_power(fam.B);
    auto c = group_by_u_power(fam.C);
    auto take = [](std::map<Expr, Expr, ExprLess>& g, const Expr& k) {
        auto it = g.find(k);
        if (it == g.end()) return Expr(0);
        Expr v = it->second;
        g.erase(it);
        return v;
    };
    DCRInstance out;
    out.m = m;
    out.p = p;
    out.b0 = take(b, e0);
    out.b1 = expand(take(b, ep) / (p + Expr(1)));
    out.c0 = take(c, r0);
    out.c1 = expand(-take(c, r2));
    if (!b.empty() || c.size() > 1) return std::nullopt;
    if (!literal_zero(build_dcr(out).rhs - pde.rhs)) return std::nullopt;
    return out;
}

std::map<std::string, Expr> to_map(const DCRInstance& in) {
    return {{"m", in.m}, {"p", in.p}, {"b0", in.b0}, {"b1", in.b1}, {"c0", in.c0}, {"c1", in.c1}};
}

std::string serialize(const DCRInstance& in) {
    std::string out;
    for (const char* k : {"m", "p", "b0", "b1", "c0", "c1"}) {
        if (!out.empty()) out += ",";
        out += std::string(k) + "=" + render(to_map(in).at(k));
    }
    return out;
}

DCRInstance parse_dcr(const std::string& record, const SymbolTable& symbols) {
    DCRInstance in;
    in.b0 = in.b1 = in.c0 = in.c1 = Expr(0);
    std::size_t start = 0;
    while (start < record.size()) {
        std::size_t comma = record.find(',', start);
        std::string item = record.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        start = comma == std::string::npos ? record.size() : comma + 1;
        auto eq = item.find('=');
        if (eq == std::string::npos) throw Error(ErrorKind::Usage, "expected key=value in '" + item + "'");
        std::string key = item.substr(0, eq);
        while (!key.empty() && key.back() == ' ') key.pop_back();
        while (!key.empty() && key.front() == ' ') key.erase(key.begin());
        Expr v = parse(item.substr(eq + 1), symbols);
        if (key == "m") in.m = v;
        else if (key == "p") in.p = v;
        else if (key == "b0") in.b0 = v;
        else if (key == "b1") in.b1 = v;
        else if (key == "c0") in.c0 = v;
        else if (key == "c1") in.c1 = v;
        else throw Error(ErrorKind::Usage, "unknown DCR key '" + key + "'");
    }
    return in;
}

} // namespace liesym
