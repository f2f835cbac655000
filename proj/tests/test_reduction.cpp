#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "liesym/equivalence.hpp"
#include "liesym/error.hpp"
#include "liesym/reduction.hpp"
#include "liesym/symmetry.hpp"

#include <cmath>
#include <random>

using namespace liesym;

namespace {

template <class Fn>
ErrorKind kind_of(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::Usage;
}

SymbolTable& table() {
    static SymbolTable t = [] {
        SymbolTable s = SymbolTable::standard();
        for (const char* p : {"c", "m", "p", "b0", "b1", "c0", "c1", "eps", "e1", "e2"}) s.declare_parameter(p);
        return s;
    }();
    return t;
}

Expr P(const std::string& s) { return parse(s, table()); }
VectorField F(const std::string& s) { return parse_field(s, table()); }

DCRInstance inst(Rational m, Rational p, Rational b0, Rational b1, Rational c0, Rational c1) {
    return {Expr(m), Expr(p), Expr(b0), Expr(b1), Expr(c0), Expr(c1)};
}

EvolutionPDE eq4() { return build_dcr(inst(2, 1, 0, 1, 0, 0)); }
EvolutionPDE heat() { return make_pde(P("u_xx")); }

// u_t - F evaluated independently with jet symbols replaced by derivatives
Expr oracle_residual(const EvolutionPDE& pde, const Expr& u) {
    Expr ux = differentiate(u, "x");
    return expand(differentiate(u, "t") -
                  substitute(pde.rhs, {{"u", u}, {"u_x", ux}, {"u_xx", differentiate(ux, "x")}}));
}

// floating-point evaluation, independent of the exact sampler
double numeric(const Expr& e, const std::map<std::string, double>& at) {
    switch (e.kind()) {
    case Kind::Number: return e.value().get_d();
    case Kind::Symbol: return at.at(e.name());
    case Kind::Pow: return std::pow(numeric(e.base(), at), numeric(e.exponent(), at));
    case Kind::Func: {
        double a = numeric(e.arg(), at);
        if (e.is_func("exp")) return std::exp(a);
        if (e.is_func("log")) return std::log(a);
        throw std::runtime_error("no numeric value for " + e.name());
    }
    case Kind::Mul: {
        double r = e.value().get_d();
        for (const auto& f : e.args()) r *= numeric(f, at);
        return r;
    }
    case Kind::Add: {
        double r = e.value().get_d();
        for (const auto& f : e.args()) r += numeric(f, at);
        return r;
    }
    }
    return NAN;
}

// |e| small at a few points where every real power is defined
bool numerically_zero(const Expr& e) {
    int used = 0;
    for (double t : {0.37, 1.9, 4.3, -2.6})
        for (double x : {0.71, -1.3})
            for (double u : {1.7}) {
                double v = numeric(e, {{"t", t}, {"x", x}, {"u", u}});
                if (!std::isfinite(v)) continue;
                ++used;
                if (std::abs(v) > 1e-8) return false;
            }
    return used >= 2;
}

} // namespace

TEST_CASE("numeric oracle") {
    CHECK(numeric(P("2*x + 3*t*x^2 + 1"), {{"t", 1}, {"x", 2}}) == doctest::Approx(17));
    CHECK(numerically_zero(P("(1 + t)^(1/2)*(1 + t)^(1/2)") - P("1 + t")));
}

TEST_CASE("invariants of translations") {
    auto g = generator_invariants(F("Dt + c*Dx"));
    CHECK(expand(g.omega - P("x - c*t")).is_zero());
    CHECK(g.multiplier.is_one());
    auto h = generator_invariants(F("Dx"));
    CHECK(expand(h.omega - P("t")).is_zero());
}

TEST_CASE("invariants of the scaling generator at (2,1)") {
    auto x3 = F("-t*Dt - t*Dx + u*Du");
    auto g = generator_invariants(x3);
    CHECK(expand(apply(x3, g.omega)).is_zero());
    CHECK(expand(apply(x3, g.multiplier) - g.multiplier).is_zero());
    CHECK(expand(g.omega - P("x - t")).is_zero());
    CHECK(expand(g.multiplier - P("t^(-1)")).is_zero());
}

TEST_CASE("property: invariants for random affine generators") {
    std::mt19937 rng(9);
    auto r = [&] { return Expr(make_rational(static_cast<long>(rng() % 7) - 3, 1 + static_cast<long>(rng() % 2))); };
    int checked = 0;
    for (int n = 0; n < 60; ++n) {
        VectorField v{r() + r() * P("t") + (n % 3 == 0 ? r() * P("x") : Expr(0)), r() + r() * P("t") + r() * P("x"), r() * P("u")};
        try {
            auto g = generator_invariants(v);
            // powers of shifted t are not canonical, so evaluate
            CHECK(numerically_zero(apply(v, g.omega)));
            CHECK(numerically_zero(apply(v, P("u") * pow(g.multiplier, Expr(-1)))));
            CHECK(depends_on_any(g.omega, {"t", "x"}));
            ++checked;
        } catch (const Error& e) {
            CHECK((e.kind() == ErrorKind::UnsupportedGenerator || e.kind() == ErrorKind::DegenerateGenerator));
        }
    }
    CHECK(checked > 40);
}

TEST_CASE("generator errors") {
    CHECK(kind_of([] { generator_invariants(F("u*Du")); }) == ErrorKind::DegenerateGenerator);
    CHECK(kind_of([] { generator_invariants(F("x^2*Dx")); }) == ErrorKind::UnsupportedGenerator);
    CHECK(kind_of([] { generator_invariants(F("Dt + u^2*Du")); }) == ErrorKind::UnsupportedGenerator);
    // rotation-like linear part has no real eigenvector
    CHECK(kind_of([] { generator_invariants(F("x*Dt - t*Dx")); }) == ErrorKind::UnsupportedGenerator);
}

TEST_CASE("traveling waves of the (u^2) equation") {
    auto r = reduce_pde(eq4(), F("Dt + c*Dx"));
    CHECK(r.certificate);
    CHECK(expand(r.residual - r.factor * r.ode).is_zero());
    // (phi^2)'' + (phi^2)' + c phi', same leading normalization
    Expr target = expand(Expr(2) * phi(0) * phi(2) + Expr(2) * phi(1) * phi(1) + Expr(2) * phi(0) * phi(1) + P("c") * phi(1));
    CHECK(expand(r.ode * Expr(2) - target).is_zero());
    CHECK(kind_of([] { reduce_pde(eq4(), F("x*Dx")); }) == ErrorKind::NotASymmetry);
}

TEST_CASE("heat reductions") {
    auto r = reduce_pde(heat(), F("Dt"));
    CHECK(expand(r.ode - phi(2)).is_zero());
    CHECK(verify_solution(heat(), lift_solution(r, P("w"))).verdict == SolutionStatus::Solution);

    // scaling 2 t Dt + x Dx reduces to phi'' + w phi' / 2 = 0 in w = x t^(-1/2)
    auto s = reduce_pde(heat(), F("2*t*Dt + x*Dx"));
    CHECK(s.certificate);
    CHECK_FALSE(depends_on(s.ode, "t"));
}

TEST_CASE("reduction by every found generator of the (u^2) equation") {
    auto pde = eq4();
    auto res = find_symmetries(pde);
    for (const auto& g : res.generators) {
        auto r = reduce_pde(pde, g);
        CHECK(r.certificate);
        CHECK_FALSE(depends_on_any(r.ode, {"t", "x", "s"}));
    }
    // the scaling -t Dt + u Du: omega = x, u = phi(x)/t
    auto r = reduce_pde(pde, F("-t*Dt + u*Du"));
    CHECK(expand(r.invariants.omega - P("x")).is_zero());
    CHECK(expand(r.invariants.multiplier - P("t^(-1)")).is_zero());
}

TEST_CASE("property: ODE solutions lift to PDE solutions") {
    // phi = w solves phi'' = 0, and stationary constant phi solves every ODE here
    auto r = reduce_pde(eq4(), F("Dt + c*Dx"));
    Expr u = lift_solution(r, Expr(5));
    CHECK(expand(substitute(r.ode, {{"w", Expr(0)}})).is_zero() == expand(r.ode).is_zero());
    CHECK(verify_solution(eq4(), u).verdict == SolutionStatus::Solution);
}

TEST_CASE("solution verification") {
    auto pde1 = build_dcr(DCRInstance{});
    CHECK(verify_solution(pde1, Expr(1)).verdict == SolutionStatus::Solution);
    CHECK(verify_solution(heat(), P("x")).verdict == SolutionStatus::Solution);
    auto bad = verify_solution(heat(), P("x^2"));
    CHECK(bad.verdict == SolutionStatus::NotSolution);
    CHECK(bad.residual == Expr(-2));
    CHECK(oracle_residual(heat(), P("x^2")) == Expr(-2));
    std::mt19937 rng(4);
    for (int n = 0; n < 20; ++n) {
        auto q = [&] { return make_rational(static_cast<long>(rng() % 9) - 4, 1 + static_cast<long>(rng() % 3)); };
        Rational m = q();
        if (m == 0) m = 5;
        auto pde = build_dcr(inst(m, 1 + static_cast<long>(rng() % 3), q(), q(), q(), q()));
        CHECK(verify_solution(pde, Expr(1)).verdict == SolutionStatus::Solution);
    }
}

TEST_CASE("flows and transformed solutions") {
    auto tr = transform_solution(P("x^2 + 2*t"), F("Dx"), P("eps"));
    CHECK(expand(tr - P("(x - eps)^2 + 2*t")).is_zero());
    CHECK(verify_solution(heat(), tr).verdict == SolutionStatus::Solution);

    // u Du is a symmetry of the heat equation; u = 1 becomes exp(eps)
    auto sc = transform_solution(Expr(1), F("u*Du"), P("eps"));
    CHECK(expand(sc - exp(P("eps"))).is_zero());
    CHECK(verify_solution(heat(), sc).verdict == SolutionStatus::Solution);

    // Galilei generator of the heat equation: 2 t Dx - x u Du
    auto gal = F("2*t*Dx - x*u*Du");
    CHECK(kind_of([&] { transform_solution(P("x"), gal, P("eps")); }) == ErrorKind::UnsupportedGenerator);

    // group law for an affine scaling flow
    auto sf = F("2*t*Dt + x*Dx + u*Du");
    Expr s = P("x^2 + 2*t");
    Expr a = transform_solution(transform_solution(s, sf, P("e1")), sf, P("e2"));
    Expr b = transform_solution(s, sf, P("e1 + e2"));
    CHECK(expand(a - b).is_zero());
}

TEST_CASE("property: transformed solutions stay solutions") {
    std::mt19937 rng(21);
    auto pde = eq4();
    auto sym = find_symmetries(pde);
    REQUIRE(sym.generators.size() >= 2);
    Expr sol = expand(P("1"));
    for (int n = 0; n < 10; ++n) {
        const auto& g = sym.generators[rng() % sym.generators.size()];
        Expr eps(make_rational(static_cast<long>(rng() % 7) - 3, 2));
        try {
            sol = transform_solution(sol, g, eps);
        } catch (const Error&) {
            continue;
        }
        CHECK(verify_solution(pde, sol).verdict == SolutionStatus::Solution);
    }
}

TEST_CASE("Galilei pullback to the drifting equation") {
    auto with_drift = inst(1, 1, 3, 1, 0, 0);
    auto dr = remove_drift(with_drift);
    auto target = build_dcr(dr.instance);
    // Burgers-type equation u_t = u_xx + 2 u u_x: u = (1 - x)/(2t)
    Expr v = P("(1 - x)/(2*t)");
    REQUIRE(verify_solution(target, v).verdict == SolutionStatus::Solution);
    Expr u = transform_solution(v, dr.witness);
    CHECK(verify_solution(build_dcr(with_drift), u).verdict == SolutionStatus::Solution);
    CHECK(verify_solution(build_dcr(with_drift), v).verdict == SolutionStatus::NotSolution);
}
