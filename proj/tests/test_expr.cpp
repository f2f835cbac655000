#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "liesym/error.hpp"
#include "liesym/expr.hpp"
#include "liesym/parser.hpp"

#include <random>

using namespace liesym;

namespace {

const SymbolTable& table() {
    static SymbolTable t = [] {
        SymbolTable s = SymbolTable::standard();
        s.declare_variable("y");
        return s;
    }();
    return t;
}

Expr P(const std::string& s) { return parse(s, table()); }

Rational Q(long a, long b) {
    Rational q(a, b);
    q.canonicalize();
    return q;
}

// random polynomial-only expression trees over x, y, u
Expr random_poly(std::mt19937& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, 9);
    int k = depth <= 0 ? pick(rng) % 3 : pick(rng);
    static const char* syms[] = {"x", "y", "u"};
    switch (k) {
    case 0: return Expr::symbol(syms[rng() % 3]);
    case 1: return Expr(Q(static_cast<long>(rng() % 11) - 5, static_cast<long>(rng() % 3) + 1));
    case 2: return Expr::symbol(syms[rng() % 3]);
    case 3:
    case 4:
    case 5: return random_poly(rng, depth - 1) + random_poly(rng, depth - 1);
    case 6:
    case 7: return random_poly(rng, depth - 1) * random_poly(rng, depth - 1);
    case 8: return random_poly(rng, depth - 1) - random_poly(rng, depth - 1);
    default: return pow(random_poly(rng, depth - 1), Expr(static_cast<long>(rng() % 3) + 1));
    }
}

// richer trees: symbolic exponents, negative powers, functions
Expr random_general(std::mt19937& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, 11);
    int k = depth <= 0 ? pick(rng) % 3 : pick(rng);
    static const char* syms[] = {"x", "u", "m", "p", "t"};
    switch (k) {
    case 0: return Expr::symbol(syms[rng() % 5]);
    case 1: return Expr(Q(static_cast<long>(rng() % 9) - 4, static_cast<long>(rng() % 4) + 1));
    case 2: return Expr::symbol(syms[rng() % 2]);
    case 3:
    case 4: return random_general(rng, depth - 1) + random_general(rng, depth - 1);
    case 5:
    case 6: return random_general(rng, depth - 1) * random_general(rng, depth - 1);
    case 7: return pow(Expr::symbol("u"), random_general(rng, depth - 1));
    case 8: {
        Expr d = random_general(rng, depth - 1) + Expr(1);
        return d.is_zero() ? d : pow(d, Expr(-1));
    }
    case 9: return func("phi", static_cast<int>(rng() % 3), random_general(rng, depth - 1));
    case 10: return exp(random_general(rng, depth - 1));
    default: return pow(Expr(Rational(static_cast<long>(rng() % 5) + 2)), Expr(Rational(1, 2)));
    }
}

// exact derivative of a polynomial in x at x0 via forward differences
Rational oracle_derivative(const Expr& e, std::map<std::string, Rational> pt, int degree) {
    std::vector<Rational> f;
    Rational x0 = pt["x"];
    for (int k = 0; k <= degree; ++k) {
        pt["x"] = x0 + k;
        f.push_back(*evaluate(e, pt));
    }
    Rational result = 0;
    std::vector<Rational> diff = f;
    for (int order = 1; order <= degree; ++order) {
        for (int i = 0; i + order <= degree; ++i) diff[i] = diff[i + 1] - diff[i];
        Rational term = diff[0] / order;
        result += (order % 2 == 1) ? term : Rational(-term);
    }
    return result;
}

int x_degree_bound(const Expr& e) {
    // crude bound: total degree of the expanded polynomial
    int best = 0;
    for (const auto& t : terms_of(expand(e))) {
        int d = 0;
        for (const auto& f : factors_of(t)) {
            auto [b, x] = split_pow(f);
            if (b.is_symbol() && b.name() == "x") d += x.value().get_num().get_si();
        }
        best = std::max(best, d);
    }
    return best;
}

} // namespace

TEST_CASE("parse examples") {
    Expr um = P("u^m");
    CHECK(um.is_pow());
    CHECK(um.base() == Expr::symbol("u"));
    CHECK(um.exponent() == Expr::symbol("m"));

    Expr r = P("(1-u^p)*(c0+c1*u^p)*u^(2-m)");
    REQUIRE(r.is_mul());
    CHECK(r.args().size() == 3);
    CHECK(r.value() == 1);

    CHECK(P("u - u").is_zero());
    CHECK(P("u - u") == Expr(0));
}

TEST_CASE("parse errors") {
    CHECK_THROWS_AS(P("u +"), Error);
    CHECK_THROWS_AS(P("q*u"), Error);
    try {
        P("u * (x + ");
        FAIL("expected syntax error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Syntax);
        CHECK(std::string(e.what()).find("position") != std::string::npos);
    }
    try {
        P("zz + 1");
        FAIL("expected undeclared");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UndeclaredSymbol);
    }
}

TEST_CASE("simplify examples and power rules") {
    CHECK(simplify(P("u^p*u^(2-m)")) == P("u^(p+2-m)"));
    CHECK(simplify(P("2*(x+t) - 2*x - 2*t")).is_zero());
    // p = m-1 in the reaction product with c0 = 0
    Expr reac = P("(1-u^p)*(c1*u^p)*u^(2-m)");
    Expr inst = simplify(substitute(reac, {{"p", P("m-1")}}));
    CHECK(inst == simplify(P("c1*(u - u^m)")));
    CHECK(simplify(P("(u^m)^p")) == P("u^(m*p)"));
    CHECK(P("u^2*u^(-2)").is_one());
    CHECK(simplify(P("(x+1)^2")) == P("x^2 + 2*x + 1"));
}

TEST_CASE("numeric powers are canonical") {
    CHECK(P("3^(1/2)*3^(1/2)") == Expr(3));
    CHECK(P("(1/3)^(1/2)") == P("1/3*3^(1/2)"));
    CHECK(P("12^(1/2)") == P("2*3^(1/2)"));
    CHECK(P("4^(1/2)") == Expr(2));
    CHECK(P("(-8)^(1/3)") == Expr(-2));
    CHECK(P("2^(3/2)") == P("2*2^(1/2)"));
}

TEST_CASE("exp and log") {
    CHECK(P("exp(t)*exp(-t)").is_one());
    CHECK(P("exp(2*t)*exp(t)") == P("exp(3*t)"));
    CHECK(P("log(exp(x))") == P("x"));
    CHECK(P("exp(0)").is_one());
    CHECK(P("exp(t)^2") == P("exp(2*t)"));
    CHECK(differentiate(P("exp(3*t)"), "t") == P("3*exp(3*t)"));
    CHECK(differentiate(P("log(t)"), "t") == P("t^(-1)"));
}

TEST_CASE("differentiate examples") {
    CHECK(differentiate(P("u^m"), "u") == P("m*u^(m-1)"));
    CHECK(differentiate(P("(m-2*p-1)*t"), "t") == P("m-2*p-1"));
    Expr f = func("phi", 0, Expr::symbol("w"));
    CHECK(differentiate(f, "w") == func("phi", 1, Expr::symbol("w")));
    CHECK(render(differentiate(f, "w")) == "phi'(w)");
    CHECK(differentiate(P("phi(w^2)"), "w") == P("2*w*phi'(w^2)"));
}

TEST_CASE("substitute examples") {
    CHECK(substitute(P("u^m"), {{"m", Expr(2)}}) == P("u^2"));
    CHECK(substitute(P("(1-u^p)*(c0+c1*u^p)*u^(2-m)"), {{"u", Expr(1)}}).is_zero());
    Expr s = substitute(P("x*u"), {{"x", P("x + b0*t")}, {"u", P("x")}});
    CHECK(simplify(s) == simplify(P("x^2 + b0*t*x")));
}

TEST_CASE("is_zero examples") {
    CHECK(is_zero(Expr(0)) == ZeroVerdict::Zero);
    CHECK(is_zero(P("u^p - u^p")) == ZeroVerdict::Zero);
    // oracle: u=2, p=3 gives 64 - 64
    Expr e = P("u^(2*p) - (u^p)^2");
    CHECK(*evaluate(substitute(P("u^(2*p)"), {{"p", Expr(3)}}), {{"u", Rational(2)}}) == 64);
    CHECK(is_zero(e) == ZeroVerdict::Zero);
    CHECK(is_zero(P("u^m - u")) == ZeroVerdict::NonZero);
    CHECK(is_zero(P("x^(1/2) - x")) == ZeroVerdict::NonZero);
    CHECK(is_zero(P("(x+1)^(-1)*(x+1) - 1")) == ZeroVerdict::Zero);
    CHECK(is_zero(P("x/(x+1) + 1/(x+1) - 1")) == ZeroVerdict::Zero);
    CHECK(is_zero(P("exp(t) - exp(2*t)")) == ZeroVerdict::NonZero);
    CHECK(is_zero(P("phi(x) - phi(x)")) == ZeroVerdict::Zero);
    CHECK(is_zero(P("phi(x) - phi'(x)")) == ZeroVerdict::NonZero);
}

TEST_CASE("render is deterministic ascii") {
    CHECK(render(P("2*u*u_xx + 2*u_x^2")) == "2*u*u_xx + 2*u_x^2");
    CHECK(render(P("-u_x")) == "-u_x");
    CHECK(render(P("1 - u^p")) == "1 - u^p");
    CHECK(render(P("u^(m-1)")) == "u^(-1 + m)");
    CHECK(render(P("1/2*t")) == "1/2*t");
}

TEST_CASE("property: simplify is idempotent") {
    std::mt19937 rng(11);
    for (int i = 0; i < 300; ++i) {
        Expr e = random_general(rng, 4);
        Expr s = simplify(e);
        Expr s2 = simplify(s);
        CHECK_MESSAGE(s2 == s, render(e));
        CHECK(render(s2) == render(s));
    }
}

TEST_CASE("property: parse(render(e)) == e") {
    std::mt19937 rng(12);
    for (int i = 0; i < 400; ++i) {
        Expr e = i % 2 ? random_general(rng, 4) : simplify(random_general(rng, 3));
        Expr back = P(render(e));
        CHECK_MESSAGE(back == e, (render(e) + "  vs  " + render(back)));
    }
}

TEST_CASE("property: derivative matches exact finite-difference oracle") {
    std::mt19937 rng(13);
    for (int i = 0; i < 200; ++i) {
        Expr e = random_poly(rng, 3);
        int deg = x_degree_bound(e);
        std::map<std::string, Rational> pt{{"x", Q(static_cast<long>(rng() % 7) - 3, 2)},
                                           {"y", Q(static_cast<long>(rng() % 5) + 1, 3)},
                                           {"u", Q(static_cast<long>(rng() % 9) - 4, 5)}};
        Rational sym = *evaluate(differentiate(e, "x"), pt);
        Rational num = oracle_derivative(e, pt, std::max(deg, 1));
        CHECK_MESSAGE(sym == num, render(e));
    }
}

TEST_CASE("property: differentiate is linear") {
    std::mt19937 rng(14);
    for (int i = 0; i < 100; ++i) {
        Expr a = random_general(rng, 3), b = random_general(rng, 3);
        Expr lhs = differentiate(Expr(3) * a - Expr(Rational(1, 2)) * b, "x");
        Expr rhs = Expr(3) * differentiate(a, "x") - Expr(Rational(1, 2)) * differentiate(b, "x");
        CHECK(simplify(lhs - rhs).is_zero());
    }
}

TEST_CASE("property: Zero verdict is sound") {
    std::mt19937 rng(15);
    for (int i = 0; i < 200; ++i) {
        Expr e = random_poly(rng, 3);
        std::map<std::string, Rational> pt{{"x", Q(2, 3)}, {"y", Q(-5, 7)}, {"u", Rational(3)}};
        Rational v = *evaluate(e, pt);
        if (v != 0) CHECK(is_zero(e) != ZeroVerdict::Zero);
        if (is_zero(e) == ZeroVerdict::Zero) CHECK(v == 0);
    }
}
