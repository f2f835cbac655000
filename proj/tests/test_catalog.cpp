#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "liesym/catalog.hpp"
#include "liesym/embedded_data.hpp"
#include "liesym/error.hpp"
#include "liesym/lie_algebra.hpp"
#include "liesym/symmetry.hpp"

#include "json.hpp"

#include <cstdio>
#include <fstream>

using namespace liesym;
using json = nlohmann::json;

namespace {

std::string schema_error(const std::string& text) {
    try {
        parse_catalog(text);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Schema) return e.what();
        return std::string("other: ") + e.what();
    }
    return "";
}

json base_doc() { return json::parse(std::string(embedded::catalog_json)); }

RegressionOptions quick() {
    RegressionOptions o;
    o.audit_samples = 150;
    o.seed = 7;
    return o;
}

const RegressionCheck* find_check(const CaseResult& r, const std::string& part) {
    for (const auto& c : r.checks)
        if (c.name.find(part) != std::string::npos) return &c;
    return nullptr;
}

const RegressionCheck* named(const CaseResult& r, const std::string& name) {
    for (const auto& c : r.checks)
        if (c.name == name) return &c;
    return nullptr;
}

} // namespace

TEST_CASE("the compiled catalog loads") {
    const auto& cat = default_catalog();
    REQUIRE(cat.size() == 5);
    CHECK(find_case(cat, "eq5").id == "eq4");
    CHECK(find_case(cat, "ovsiannikov").generators.size() == 4);
    CHECK_THROWS_AS(find_case(cat, "nope"), Error);
    for (const auto& c : cat) CHECK_FALSE(c.anchor.empty());
    const auto& sp = find_case(cat, "special");
    CHECK(sp.exponential);
    // p = m - 1 stays symbolic until sampled
    CHECK(expand(sp.instance_at(sp.samples[1]).p - Expr(2)).is_zero());
}

TEST_CASE("load from a file matches the compiled copy") {
    std::string path = "catalog_copy.json";
    {
        std::ofstream out(path);
        out << embedded::catalog_json;
    }
    auto cat = load_catalog(path);
    std::remove(path.c_str());
    REQUIRE(cat.size() == default_catalog().size());
    for (std::size_t i = 0; i < cat.size(); ++i) {
        CHECK(cat[i].id == default_catalog()[i].id);
        CHECK(cat[i].instance == default_catalog()[i].instance);
    }
    CHECK_THROWS_AS(load_catalog("/nonexistent/catalog.json"), Error);
}

TEST_CASE("schema violations carry their location") {
    CHECK(schema_error("{").find("malformed") != std::string::npos);
    CHECK(schema_error("[]").find("document") != std::string::npos);
    CHECK(schema_error(R"({"schema": "other", "cases": []})").find("schema") != std::string::npos);

    json d = base_doc();
    d["cases"][1]["generators"][2] = "t*Dt +* Dx";
    CHECK(schema_error(d.dump()).find("cases[1].generators[2]") != std::string::npos);

    d = base_doc();
    d["cases"][0]["instance"].erase("c1");
    CHECK(schema_error(d.dump()).find("cases[0].instance") != std::string::npos);

    d = base_doc();
    d["cases"][2]["samples"][0]["params"]["q"] = "2";
    CHECK(schema_error(d.dump()).find("cases[2].samples[0].params.q") != std::string::npos);

    d = base_doc();
    d["cases"][2]["samples"][0]["dim"] = "four";
    CHECK(schema_error(d.dump()).find("cases[2].samples[0].dim") != std::string::npos);

    d = base_doc();
    d["cases"][3]["id"] = "eq1";
    CHECK(schema_error(d.dump()).find("duplicate") != std::string::npos);

    d = base_doc();
    d["cases"][0]["instance"]["z"] = "1";
    CHECK(schema_error(d.dump()).find("unknown coefficient") != std::string::npos);
}

TEST_CASE("stored generators are symmetries at every sample") {
    for (const auto& c : default_catalog())
        for (const auto& s : c.samples) {
            auto pde = build_dcr(c.instance_at(s));
            for (const auto& g : c.generators_at(s)) CHECK(is_symmetry(pde, g).residual.is_zero());
            for (const auto& r : c.refuted)
                CHECK(is_symmetry(pde, expand(substitute(r, s.params))).verdict == SymmetryStatus::NotSymmetry);
        }
}

TEST_CASE("full regression passes") {
    auto rep = run_regression(default_catalog(), quick());
    INFO(rep.render());
    CHECK(rep.passed());
    CHECK(rep.seed == 7);
    CHECK(rep.render().find("cases: 5, failed: 0") != std::string::npos);
}

TEST_CASE("regression is deterministic across job counts") {
    auto o = quick();
    auto a = run_regression(default_catalog(), o);
    o.jobs = 3;
    auto b = run_regression(default_catalog(), o);
    CHECK(a.render() == b.render());
}

TEST_CASE("negative control: injected wrong generator") {
    json d = base_doc();
    // x Dx alone does not leave the drift-free equation invariant
    d["cases"][1]["generators"][1] = "x*Dx";
    auto cat = parse_catalog(d.dump());
    auto r = run_case(cat[1], quick());
    CHECK_FALSE(r.passed());
    const auto* c = find_check(r, "(b1=1,m=2,p=1) symmetry X2");
    REQUIRE(c != nullptr);
    CHECK_FALSE(c->passed);
    CHECK(c->detail.find("residual") != std::string::npos);
    CHECK(c->detail.find("residual 0") == std::string::npos);
    // other cases are untouched
    CHECK(run_case(cat[0], quick()).passed());
}

TEST_CASE("negative control: injected fifth candidate") {
    json d = base_doc();
    auto& cand = d["cases"][1]["samples"][2]["candidates"];
    // Ad(exp(X1/5)) X3 = X3 - X1 at (m,p) = (2,3)
    cand.push_back("X3 - X1");
    auto cat = parse_catalog(d.dump());
    auto r = run_case(cat[1], quick());
    CHECK_FALSE(r.passed());
    const auto* c = find_check(r, "(b1=1,m=2,p=3) candidate system audit");
    REQUIRE(c != nullptr);
    CHECK_FALSE(c->passed);
    CHECK(c->detail.find("5 candidates, 1 pairs") != std::string::npos);
    CHECK(c->detail.find("pair (3,5)") != std::string::npos);
}

TEST_CASE("negative control: wrong stored claims") {
    json d = base_doc();
    d["cases"][2]["samples"][0]["label"] = "A3,5^a";
    d["cases"][2]["samples"][1]["optimal_size"] = 8;
    d["cases"][3]["nonsolutions"].push_back("x + 4*t + x^2");
    d["cases"][3]["nonsolutions"].push_back("x");
    d["cases"][3]["solutions"].push_back("x^2");
    auto cat = parse_catalog(d.dump());
    auto r = run_case(cat[2], quick());
    CHECK_FALSE(find_check(r, "(m=2) identifies")->passed);
    CHECK_FALSE(find_check(r, "(m=3) optimal system size")->passed);
    auto h = run_case(cat[3], quick());
    REQUIRE(named(h, "non-solution x") != nullptr);
    CHECK_FALSE(named(h, "non-solution x")->passed);
    CHECK(named(h, "non-solution x + 4*t + x^2")->passed);
    REQUIRE(named(h, "solution x^2") != nullptr);
    CHECK_FALSE(named(h, "solution x^2")->passed);
}

TEST_CASE("symbolic structure of the stored drift-free basis") {
    const auto& c = find_case(default_catalog(), "eq4");
    auto l = structure_constants(c.generators);
    SymbolTable s = catalog_symbols();
    // [X1, X3] = (m - 2p - 1) X1, [X2, X3] = (m - p - 1) X2
    CHECK(expand(l.C(0, 2, 0) - parse("m - 2*p - 1", s)).is_zero());
    CHECK(expand(l.C(1, 2, 1) - parse("m - p - 1", s)).is_zero());
    CHECK(l.C(0, 1, 0).is_zero());
    CHECK(check_jacobi(l));
}
