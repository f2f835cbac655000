#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "liesym/error.hpp"
#include "liesym/jet.hpp"
#include "liesym/parser.hpp"

#include <random>

using namespace liesym;

namespace {

const SymbolTable& table() {
    static SymbolTable t = SymbolTable::standard();
    return t;
}

Expr P(const std::string& s) { return parse(s, table()); }

bool same(const Expr& a, const Expr& b) { return is_zero(a - b) == ZeroVerdict::Zero; }

Expr random_fn(std::mt19937& rng) {
    static const char* atoms[] = {"t", "x", "u", "u_x", "u_xx", "u_t"};
    Expr e = Expr(static_cast<long>(rng() % 5) - 2);
    int terms = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < terms; ++i) {
        Expr term = Expr(static_cast<long>(rng() % 7) - 3);
        int f = 1 + static_cast<int>(rng() % 3);
        for (int k = 0; k < f; ++k) term = term * Expr::symbol(atoms[rng() % 6]);
        e = e + term;
    }
    return e;
}

} // namespace

TEST_CASE("jet names") {
    CHECK(jet_name(0, 0) == "u");
    CHECK(jet_name(1, 0) == "u_t");
    CHECK(jet_name(1, 1) == "u_tx");
    CHECK(jet_name(0, 2) == "u_xx");
    CHECK(parse_jet_name("u_tx") == std::make_pair(1, 1));
    CHECK(!parse_jet_name("ux").has_value());
    CHECK(!parse_jet_name("u_xt").has_value());
    CHECK(jet_order(P("u*u_x + u_xx")) == 2);
    CHECK(jet_order(P("t*x")) == 0);
}

TEST_CASE("total derivative examples") {
    CHECK(same(total_derivative(P("x*u_x"), 'x'), P("u_x + x*u_xx")));
    CHECK(same(total_derivative(P("u^2"), 't'), P("2*u*u_t")));
    CHECK(same(total_derivative(P("t*exp(x)"), 'x'), P("t*exp(x)")));
    CHECK_THROWS_AS(total_derivative(P("u_xx"), 'x'), Error);
    CHECK(same(total_derivative(P("u_xx"), 'x', 3), Expr::symbol("u_xxx")));
}

TEST_CASE("prolongation of the x-scaling") {
    VectorField v{Expr(0), P("x"), Expr(0)};
    auto pr = prolong2(v);
    CHECK(same(pr.eta_x, P("-u_x")));
    CHECK(same(pr.eta_xx, P("-2*u_xx")));
    CHECK(same(pr.eta_t, Expr(0)));
}

TEST_CASE("prolongation of translations and u-scaling") {
    auto pr = prolong2({Expr(1), Expr(0), Expr(0)});
    CHECK(same(pr.eta_t, Expr(0)));
    CHECK(same(pr.eta_xx, Expr(0)));
    auto ps = prolong2({Expr(0), Expr(0), P("u")});
    CHECK(same(ps.eta_t, P("u_t")));
    CHECK(same(ps.eta_x, P("u_x")));
    CHECK(same(ps.eta_xx, P("u_xx")));
    auto pg = prolong2({Expr(0), P("2*t"), P("-x*u")});
    CHECK(same(pg.eta_x, P("-u - x*u_x")));
}

TEST_CASE("field parse and render") {
    auto v = parse_field("x*Dx + 2*u*Du", table());
    CHECK(same(v.xi_t, Expr(0)));
    CHECK(same(v.xi_x, P("x")));
    CHECK(same(v.eta, P("2*u")));
    CHECK(render(v) == "x*Dx + 2*u*Du");
    CHECK_THROWS_AS(parse_field("x*Dx*Dt", table()), Error);
    CHECK(same(apply(v, P("x^2*u")), P("4*x^2*u")));
}

TEST_CASE("property: total derivatives are linear and satisfy Leibniz") {
    std::mt19937 rng(41);
    for (int i = 0; i < 60; ++i) {
        Expr f = random_fn(rng), g = random_fn(rng);
        for (char dir : {'t', 'x'}) {
            Expr lhs = total_derivative(Expr(3) * f - g, dir, 3);
            Expr rhs = Expr(3) * total_derivative(f, dir, 3) - total_derivative(g, dir, 3);
            CHECK(same(lhs, rhs));
            Expr pl = total_derivative(f * g, dir, 3);
            Expr pr = total_derivative(f, dir, 3) * g + f * total_derivative(g, dir, 3);
            CHECK(same(pl, pr));
        }
    }
}

TEST_CASE("property: D_t and D_x commute") {
    std::mt19937 rng(7);
    for (int i = 0; i < 60; ++i) {
        Expr f = random_fn(rng);
        Expr a = total_derivative(total_derivative(f, 'x', 4), 't', 4);
        Expr b = total_derivative(total_derivative(f, 't', 4), 'x', 4);
        CHECK(same(a, b));
    }
}

TEST_CASE("property: prolongation is linear in the field") {
    std::mt19937 rng(3);
    for (int i = 0; i < 30; ++i) {
        auto comp = [&] {
            Expr e = Expr(0);
            static const char* atoms[] = {"t", "x", "u"};
            for (int k = 0; k < 3; ++k)
                e = e + Expr(static_cast<long>(rng() % 5) - 2) * Expr::symbol(atoms[rng() % 3]) *
                            Expr::symbol(atoms[rng() % 3]);
            return e;
        };
        VectorField a{comp(), comp(), comp()}, b{comp(), comp(), comp()};
        auto pa = prolong2(a), pb = prolong2(b), ps = prolong2(a + Expr(2) * b);
        CHECK(same(ps.eta_t, pa.eta_t + Expr(2) * pb.eta_t));
        CHECK(same(ps.eta_x, pa.eta_x + Expr(2) * pb.eta_x));
        CHECK(same(ps.eta_xx, pa.eta_xx + Expr(2) * pb.eta_xx));
    }
}
