#include "liesym/equivalence.hpp"

#include "liesym/error.hpp"
#include "liesym/linalg.hpp"

#include <set>

namespace liesym {

namespace {

const Expr T = Expr::symbol("t");
const Expr X = Expr::symbol("x");
const Expr U = Expr::symbol("u");

bool literal_zero(const Expr& e) { return is_zero(e) == ZeroVerdict::Zero; }

std::optional<Rational> rational_of(const Expr& e) {
    Expr x = expand(e);
    if (x.is_number()) return x.value();
    return std::nullopt;
}

} // namespace

ET ET::boost(const Expr& g) {
    ET e;
    e.g = g;
    return e;
}

ET ET::scaling(const Expr& k0, const Expr& k1, const Expr& k2) {
    ET e;
    e.k0 = k0;
    e.k1 = k1;
    e.k2 = k2;
    return e;
}

std::array<Expr, 7> params(const ET& g) { return {g.k0, g.k1, g.k2, g.g, g.d0, g.d1, g.d2}; }

ET from_params(const std::array<Expr, 7>& p) {
    ET g;
    g.k0 = p[0];
    g.k1 = p[1];
    g.k2 = p[2];
    g.g = p[3];
    g.d0 = p[4];
    g.d1 = p[5];
    g.d2 = p[6];
    return g;
}

bool operator==(const ET& a, const ET& b) {
    auto pa = params(a), pb = params(b);
    for (int i = 0; i < 7; ++i)
        if (expand(pa[i]) != expand(pb[i])) return false;
    return true;
}

void check_invertible(const ET& g) {
    for (const Expr* k : {&g.k0, &g.k1, &g.k2})
        if (expand(*k).is_zero()) throw Error(ErrorKind::NonInvertible, "equivalence transformation has a zero scaling");
}

std::string render(const ET& g) {
    static const char* names[] = {"k0", "k1", "k2", "g", "d0", "d1", "d2"};
    auto p = params(g);
    std::string out;
    for (int i = 0; i < 7; ++i) {
        if (i) out += ", ";
        out += std::string(names[i]) + "=" + render(expand(p[i]));
    }
    return out;
}

EvolutionPDE apply_et(const ET& g, const EvolutionPDE& pde) {
    check_invertible(g);
    Expr t_old = (T - g.d0) / g.k0;
    Expr x_old = (X - g.g * t_old - g.d1) / g.k1;
    Expr u_old = (U - g.d2) / g.k2;
    Expr f = substitute(pde.rhs, {{"t", t_old},
                                  {"x", x_old},
                                  {"u", u_old},
                                  {"u_x", g.k1 * Expr::symbol("u_x") / g.k2},
                                  {"u_xx", g.k1 * g.k1 * Expr::symbol("u_xx") / g.k2}});
    return make_pde(expand((g.k2 * f - g.g * Expr::symbol("u_x")) / g.k0));
}

ET compose(const ET& a, const ET& b) {
    ET r;
    r.k0 = expand(a.k0 * b.k0);
    r.d0 = expand(a.k0 * b.d0 + a.d0);
    r.k1 = expand(a.k1 * b.k1);
    r.g = expand(a.k1 * b.g + a.g * b.k0);
    r.d1 = expand(a.k1 * b.d1 + a.g * b.d0 + a.d1);
    r.k2 = expand(a.k2 * b.k2);
    r.d2 = expand(a.k2 * b.d2 + a.d2);
    return r;
}

ET invert(const ET& g) {
    check_invertible(g);
    ET r;
    r.k0 = expand(Expr(1) / g.k0);
    r.d0 = expand(-g.d0 / g.k0);
    r.k1 = expand(Expr(1) / g.k1);
    r.g = expand(-g.g / (g.k0 * g.k1));
    r.d1 = expand((g.g * g.d0 / g.k0 - g.d1) / g.k1);
    r.k2 = expand(Expr(1) / g.k2);
    r.d2 = expand(-g.d2 / g.k2);
    return r;
}

VectorField pushforward(const ET& g, const VectorField& v) {
    check_invertible(g);
    Expr t_old = (T - g.d0) / g.k0;
    Expr x_old = (X - g.g * t_old - g.d1) / g.k1;
    Expr u_old = (U - g.d2) / g.k2;
    std::map<std::string, Expr> back = {{"t", t_old}, {"x", x_old}, {"u", u_old}};
    VectorField w{g.k0 * v.xi_t, g.k1 * v.xi_x + g.g * v.xi_t, g.k2 * v.eta};
    return expand(substitute(w, back));
}

std::optional<DCRInstance> apply_et(const ET& g, const DCRInstance& inst) {
    if (!expand(g.d2).is_zero()) return std::nullopt;
    return match_dcr(apply_et(g, build_dcr(inst)), inst.m, inst.p);
}

DriftRemoval remove_drift(const DCRInstance& inst) {
    DriftRemoval r;
    r.witness = ET::boost(inst.b0);
    r.instance = inst;
    r.instance.b0 = Expr(0);
    return r;
}

std::optional<Coefficient> parse_coefficient(const std::string& name) {
    if (name == "b1") return Coefficient::b1;
    if (name == "c0") return Coefficient::c0;
    if (name == "c1") return Coefficient::c1;
    return std::nullopt;
}

const char* to_string(Coefficient c) {
    switch (c) {
    case Coefficient::b1: return "b1";
    case Coefficient::c0: return "c0";
    case Coefficient::c1: return "c1";
    }
    return "?";
}

const char* to_string(EquivalenceStatus s) {
    switch (s) {
    case EquivalenceStatus::Equivalent: return "Equivalent";
    case EquivalenceStatus::NotEquivalent: return "NotEquivalent";
    case EquivalenceStatus::Undecided: return "Undecided";
    }
    return "?";
}

namespace {

// k0^e0 k1^e1 k2^e2 = value
struct MonoEq {
    std::array<Rational, 3> e;
    Rational value;
    std::string name;
};

std::string render(const std::vector<MonoEq>& eqs) {
    std::string out;
    for (const auto& q : eqs) {
        if (!out.empty()) out += "; ";
        out += q.name + ": ";
        for (int i = 0; i < 3; ++i) out += "k" + std::to_string(i) + "^(" + liesym::render(q.e[i]) + ")*";
        out.pop_back();
        out += " = " + liesym::render(q.value);
    }
    return out;
}

// sign of (-1)^e for a rational e, or 0 when not real
int neg_power_sign(const Rational& e) {
    if (e.get_den() % 2 == 0) return 0;
    return e.get_num() % 2 == 0 ? 1 : -1;
}

int pattern_sign(const MonoEq& q, const std::array<int, 3>& s) {
    int sign = 1;
    for (int i = 0; i < 3; ++i) {
        if (s[i] > 0 || q.e[i] == 0) continue;
        int v = neg_power_sign(q.e[i]);
        if (v == 0) return 0;
        sign *= v;
    }
    return sign;
}

// positive magnitudes |k_i| solving the log-linearized system exactly over a
// prime basis; free unknowns are set to log 1
std::optional<std::array<Expr, 3>> solve_magnitudes(const std::vector<MonoEq>& eqs) {
    std::set<Integer> primes;
    for (const auto& q : eqs) {
        if (q.value == 0) return std::nullopt;
        for (const auto& [pr, e] : factorize(abs(Integer(q.value.get_num())))) primes.insert(pr);
        for (const auto& [pr, e] : factorize(Integer(q.value.get_den()))) primes.insert(pr);
    }
    QMatrix m(eqs.size(), 3);
    for (std::size_t i = 0; i < eqs.size(); ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = eqs[i].e[j];
    std::array<Expr, 3> mag = {Expr(1), Expr(1), Expr(1)};
    for (const auto& pr : primes) {
        std::vector<Rational> rhs;
        for (const auto& q : eqs) {
            long v = 0;
            auto num = factorize(abs(Integer(q.value.get_num())));
            auto den = factorize(Integer(q.value.get_den()));
            if (num.count(pr)) v += num[pr];
            if (den.count(pr)) v -= den[pr];
            rhs.push_back(Rational(v));
        }
        std::vector<Rational> y;
        if (!m.solve(rhs, y)) return std::nullopt;
        for (int j = 0; j < 3; ++j)
            if (y[j] != 0) mag[j] = mag[j] * pow(Expr(Rational(pr)), Expr(y[j]));
    }
    for (auto& v : mag) v = expand(v);
    return mag;
}

const std::array<std::array<int, 3>, 8> kPatterns = {{{1, 1, 1},
                                                     {1, 1, -1},
                                                     {1, -1, 1},
                                                     {1, -1, -1},
                                                     {-1, 1, 1},
                                                     {-1, 1, -1},
                                                     {-1, -1, 1},
                                                     {-1, -1, -1}}};

bool pattern_ok(const std::vector<MonoEq>& eqs, const std::array<int, 3>& s) {
    for (const auto& q : eqs) {
        int v = pattern_sign(q, s);
        if (v == 0 || v != (q.value > 0 ? 1 : -1)) return false;
    }
    return true;
}

struct Exponents {
    Rational m, p;
};

Exponents rational_exponents(const DCRInstance& inst) {
    auto m = rational_of(inst.m), p = rational_of(inst.p);
    if (!m || !p) throw Error(ErrorKind::Domain, "exponents m and p must be rational");
    return {*m, *p};
}

bool has_reaction(const DCRInstance& a) { return !literal_zero(a.c0) || !literal_zero(a.c1); }

MonoEq diffusion_eq(const Exponents& ex) { return {{Rational(-1), Rational(2), 1 - ex.m}, Rational(1), "diffusion"}; }
MonoEq reaction_eq(const Exponents& ex) { return {{Rational(0), Rational(0), ex.p}, Rational(1), "reaction form"}; }
std::array<Rational, 3> coef_exponents(Coefficient c, const Exponents& ex) {
    switch (c) {
    case Coefficient::b1: return {Rational(-1), Rational(1), -ex.p};
    case Coefficient::c0: return {Rational(-1), Rational(0), ex.m - 1};
    case Coefficient::c1: return {Rational(-1), Rational(0), ex.m - 1 - 2 * ex.p};
    }
    return {};
}

const Expr& coef_of(const DCRInstance& in, Coefficient c) {
    switch (c) {
    case Coefficient::b1: return in.b1;
    case Coefficient::c0: return in.c0;
    case Coefficient::c1: return in.c1;
    }
    return in.b1;
}

ET scaling_of(const std::array<Expr, 3>& mag, const std::array<int, 3>& s) {
    return ET::scaling(expand(Expr(s[0]) * mag[0]), expand(Expr(s[1]) * mag[1]), expand(Expr(s[2]) * mag[2]));
}

} // namespace

Normalization normalize_coefficient(const DCRInstance& inst, Coefficient target) {
    Exponents ex = rational_exponents(inst);
    auto c = rational_of(coef_of(inst, target));
    if (!c) throw Error(ErrorKind::Domain, std::string("coefficient ") + to_string(target) + " must be rational");
    if (*c == 0) throw Error(ErrorKind::Domain, std::string("coefficient ") + to_string(target) + " is zero");
    std::vector<MonoEq> fixed = {diffusion_eq(ex)};
    if (has_reaction(inst) && ex.p != 0) fixed.push_back(reaction_eq(ex));
    // |target*| = 1
    MonoEq goal{coef_exponents(target, ex), 1 / abs(*c), std::string(to_string(target)) + " magnitude"};
    std::vector<MonoEq> all = fixed;
    all.push_back(goal);
    Normalization out;
    out.system = render(all);
    if (*c == 1 || *c == -1) {
        out.instance = inst;
        out.witness = ET::identity();
    }
    auto mag = solve_magnitudes(all);
    if (!mag) throw Error(ErrorKind::NoScaling, "no real scaling: " + out.system);
    std::set<int> signs;
    for (const auto& s : kPatterns) {
        if (!pattern_ok(fixed, s)) continue;
        int v = pattern_sign(goal, s);
        if (v == 0) continue;
        signs.insert(v * (*c > 0 ? 1 : -1));
    }
    out.reachable_signs.assign(signs.begin(), signs.end());
    if (*c == 1 || *c == -1) return out;
    out.witness = scaling_of(*mag, {1, 1, 1});
    auto img = apply_et(out.witness, inst);
    if (!img) throw Error(ErrorKind::NoScaling, "scaling left the family: " + render(out.witness));
    Expr v = expand(coef_of(*img, target));
    if (!(v == Expr(1) || v == Expr(-1)))
        throw Error(ErrorKind::NoScaling, "scaling did not normalize " + std::string(to_string(target)));
    out.instance = *img;
    return out;
}

EquivalenceVerdict are_equivalent(const DCRInstance& a, const DCRInstance& b) {
    EquivalenceVerdict out;
    Exponents ea, eb;
    try {
        ea = rational_exponents(a);
        eb = rational_exponents(b);
    } catch (const Error& e) {
        out.reason = e.what();
        return out;
    }
    if (ea.m != eb.m || ea.p != eb.p) {
        out.verdict = EquivalenceStatus::NotEquivalent;
        out.reason = "exponents (m, p) differ and are invariant";
        return out;
    }
    std::vector<MonoEq> eqs = {diffusion_eq(ea)};
    if (has_reaction(a) || has_reaction(b)) {
        if (ea.p != 0) eqs.push_back(reaction_eq(ea));
    }
    for (Coefficient c : {Coefficient::b1, Coefficient::c0, Coefficient::c1}) {
        auto va = rational_of(coef_of(a, c)), vb = rational_of(coef_of(b, c));
        if (!va || !vb) {
            out.reason = "coefficients must be rational";
            return out;
        }
        if ((*va == 0) != (*vb == 0)) {
            out.verdict = EquivalenceStatus::NotEquivalent;
            out.reason = std::string(to_string(c)) + " vanishes for exactly one instance";
            return out;
        }
        if (*va == 0) continue;
        eqs.push_back({coef_exponents(c, ea), *vb / *va, to_string(c)});
    }
    auto mag = solve_magnitudes(eqs);
    if (!mag) {
        out.verdict = EquivalenceStatus::NotEquivalent;
        out.reason = "magnitude system inconsistent: " + render(eqs);
        return out;
    }
    auto b0a = rational_of(a.b0), b0b = rational_of(b.b0);
    if (!b0a || !b0b) {
        out.reason = "drift coefficients must be rational";
        return out;
    }
    bool any_pattern = false;
    for (const auto& s : kPatterns) {
        if (!pattern_ok(eqs, s)) continue;
        any_pattern = true;
        ET w = scaling_of(*mag, s);
        w.g = expand(Expr(*b0a) * w.k1 - Expr(*b0b) * w.k0);
        if (literal_zero(apply_et(w, build_dcr(a)).rhs - build_dcr(b).rhs)) {
            out.verdict = EquivalenceStatus::Equivalent;
            out.witness = w;
            out.reason = "witness verified by apply-et";
            return out;
        }
    }
    if (!any_pattern) {
        out.verdict = EquivalenceStatus::NotEquivalent;
        out.reason = "no sign pattern of (k0, k1, k2) satisfies " + render(eqs);
        return out;
    }
    out.reason = "candidate scaling did not verify: " + render(eqs);
    return out;
}

} // namespace liesym
