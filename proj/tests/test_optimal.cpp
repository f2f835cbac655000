#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "liesym/algebra_catalog.hpp"
#include "liesym/error.hpp"
#include "liesym/optimal.hpp"
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

QAlgebra eq5_at(long m, long p) {
    SymbolTable t = SymbolTable::standard();
    t.declare_parameter("m");
    t.declare_parameter("p");
    std::vector<VectorField> b = {parse_field("Dt", t), parse_field("Dx", t),
                                  parse_field("(m-2*p-1)*t*Dt + (m-p-1)*x*Dx - t*Dx + u*Du", t)};
    return to_rational(instantiate(structure_constants(b), {{"m", Expr(m)}, {"p", Expr(p)}}));
}

QAlgebra two_dim() {
    QAlgebra q(2);
    q.C(0, 1, 0) = 1;
    q.C(1, 0, 0) = -1;
    return q;
}

std::vector<std::pair<std::string, std::optional<Rational>>> classes() {
    std::vector<std::pair<std::string, std::optional<Rational>>> out;
    for (const auto& a : algebra_catalog()) {
        std::optional<Rational> param;
        if (a.param == "a") param = Rational(-1, 3);
        if (a.param == "b") param = Rational(1, 4);
        out.push_back({a.label, param});
    }
    return out;
}

std::vector<Rational> rvec(std::mt19937& rng, std::size_t n) {
    for (;;) {
        std::vector<Rational> v;
        for (std::size_t i = 0; i < n; ++i) v.push_back(make_rational(static_cast<long>(rng() % 11) - 5, 1 + static_cast<long>(rng() % 3)));
        if (!is_zero_vector(v)) return v;
    }
}

} // namespace

TEST_CASE("adjoint matrices") {
    auto ab = adjoint_matrix(QAlgebra(3), 1, Expr(Rational(7, 2)));
    CHECK(ab.closed_form);
    CHECK((ab.numeric - Eigen::MatrixXd::Identity(3, 3)).norm() == 0);

    Expr eps = Expr::symbol("eps");
    auto a2 = adjoint_matrix(two_dim(), 1, eps);
    REQUIRE(a2.closed_form);
    // Ad(exp(eps e2)) e1 = exp(-eps) e1
    CHECK(expand(a2.exact[0][0] - exp(-eps)).is_zero());
    CHECK(a2.exact[1][0].is_zero());
    CHECK(a2.exact[1][1].is_one());

    auto q = eq5_at(2, 3);
    // ad X3 on <X1, X2> is triangular with eigenvalues 5 and 2
    auto a3 = adjoint_matrix(q, 2, eps);
    REQUIRE(a3.closed_form);
    CHECK(expand(a3.exact[0][0] - exp(Expr(5) * eps)).is_zero());
    CHECK(expand(a3.exact[1][1] - exp(Expr(2) * eps)).is_zero());
    CHECK(a3.exact[2][2].is_one());

    auto so3 = canonical_algebra("A3,9");
    CHECK(kind_of([&] { adjoint_matrix(so3, 0, eps); }) == ErrorKind::Domain);
    auto num = adjoint_matrix(so3, 0, Expr(Rational(1, 3)));
    CHECK(std::fabs(num.numeric.determinant() - 1) < 1e-12);
}

TEST_CASE("property: adjoint matrices are homomorphic in eps") {
    Expr e1 = Expr::symbol("e1"), e2 = Expr::symbol("e2");
    for (const auto& [label, param] : classes()) {
        auto q = canonical_algebra(label, param);
        for (std::size_t i = 0; i < q.dim; ++i) {
            auto a = adjoint_matrix(q, i, Expr(0));
            if (!a.closed_form) continue;
            auto x = adjoint_matrix(q, i, e1).exact, y = adjoint_matrix(q, i, e2).exact;
            auto z = adjoint_matrix(q, i, e1 + e2).exact;
            auto prod = multiply(x, y);
            for (std::size_t r = 0; r < q.dim; ++r)
                for (std::size_t c = 0; c < q.dim; ++c) CHECK_MESSAGE(expand(prod[r][c] - z[r][c]).is_zero(), label);
        }
    }
}

TEST_CASE("property: Ad is an automorphism") {
    std::mt19937 rng(3);
    for (const auto& [label, param] : classes()) {
        auto q = canonical_algebra(label, param);
        for (std::size_t i = 0; i < q.dim; ++i) {
            double t = static_cast<double>(rng() % 9) / 4 - 1;
            Eigen::MatrixXd a = expm(to_eigen(q.ad(std::vector<Rational>(q.dim, 0))) * 0 + to_eigen(q.ad([&] {
                std::vector<Rational> e(q.dim, 0);
                e[i] = 1;
                return e;
            }())) * t);
            // [A x, A y] = A [x, y] on basis vectors
            for (std::size_t j = 0; j < q.dim; ++j)
                for (std::size_t k = 0; k < q.dim; ++k) {
                    Eigen::VectorXd bx = a.col(j), by = a.col(k), lhs = Eigen::VectorXd::Zero(q.dim);
                    for (std::size_t r = 0; r < q.dim; ++r)
                        for (std::size_t s = 0; s < q.dim; ++s)
                            for (std::size_t m = 0; m < q.dim; ++m) lhs(m) += bx(r) * by(s) * q.C(r, s, m).get_d();
                    Eigen::VectorXd br = Eigen::VectorXd::Zero(q.dim);
                    for (std::size_t m = 0; m < q.dim; ++m) br(m) = q.C(j, k, m).get_d();
                    CHECK_MESSAGE((lhs - a * br).norm() < 1e-9, label);
                }
        }
    }
}

TEST_CASE("conjugacy in the two-dimensional algebra") {
    auto q = two_dim();
    auto same = are_conjugate(q, {1, 0}, {2, 0});
    CHECK(same.verdict == ConjugacyStatus::Conjugate);
    REQUIRE(same.witness);
    CHECK(same.witness->word.empty());

    auto self = are_conjugate(q, {1, 3}, {1, 3});
    CHECK(self.verdict == ConjugacyStatus::Conjugate);
    CHECK(self.witness->word.empty());

    // exp(eps ad e1) e2 = e2 - eps e1, so eps = -1 gives e2 + e1
    auto shift = are_conjugate(q, {0, 1}, {1, 1});
    CHECK(shift.verdict == ConjugacyStatus::Conjugate);
    REQUIRE(shift.witness);
    CHECK(shift.witness->exact);
    OrbitClassifier oc(q);
    auto img = oc.apply_word_exact(shift.witness->word, {0, 1});
    REQUIRE(img);
    CHECK((*img)[0] == (*img)[1]);

    auto no = are_conjugate(q, {1, 0}, {0, 1});
    CHECK(no.verdict == ConjugacyStatus::NotConjugate);
    CHECK(no.invariant == "derived series depth");
    CHECK(no.value_v != no.value_w);
}

TEST_CASE("property: NotConjugate verdicts name a differing invariant") {
    std::mt19937 rng(5);
    for (const auto& [label, param] : classes()) {
        auto q = canonical_algebra(label, param);
        OrbitClassifier oc(q);
        for (int n = 0; n < 20; ++n) {
            auto v = rvec(rng, q.dim), w = rvec(rng, q.dim);
            if (n % 3 == 0)
                for (std::size_t i = 0; i + 1 < q.dim; ++i) v[i] = 0;
            if (is_zero_vector(v)) v.back() = 1;
            auto r = are_conjugate(oc, v, w);
            CHECK(r.verdict != ConjugacyStatus::Undecided);
            if (r.verdict == ConjugacyStatus::NotConjugate) {
                CHECK_FALSE(r.invariant.empty());
                CHECK(r.value_v != r.value_w);
            } else {
                REQUIRE(r.witness);
                CHECK_MESSAGE(r.witness->residual <= 1e-9, label);
            }
        }
    }
}

TEST_CASE("optimal system sizes") {
    for (const auto& [label, param] : classes()) {
        auto q = canonical_algebra(label, param);
        auto sys = construct_optimal_system(q);
        if (q.dim == 3) CHECK_MESSAGE(sys.size() <= 4, label);
        if (label == "2A2") {
            CHECK(sys.size() == 7);
            bool family = false;
            for (const auto& r : sys)
                for (const auto& p : r.params) family = family || p.kind == ParamKind::Real;
            CHECK(family);
        }
    }
    auto sys = construct_optimal_system(eq5_at(2, 3));
    CHECK(sys.size() == 4);
    auto ab = construct_optimal_system(QAlgebra(3));
    REQUIRE(ab.size() == 3);
    CHECK(ab[0].render() == "X1 + k*X2 + l*X3 | k in R; l in R");
    CHECK(ab[2].render() == "X3");
}

TEST_CASE("property: normal forms are invariant along adjoint orbits") {
    std::mt19937 rng(17);
    for (const auto& [label, param] : classes()) {
        auto base = canonical_algebra(label, param);
        OrbitClassifier oc(base);
        for (int n = 0; n < 25; ++n) {
            auto v = rvec(rng, base.dim);
            if (n % 4 == 1) v[0] = 0;
            if (n % 4 == 2 && base.dim > 2) v[base.dim - 1] = 0;
            if (is_zero_vector(v)) v.back() = 1;
            NormalForm a = oc.normal_form(v);
            CHECK_MESSAGE(a.residual <= 1e-9, label);
            std::vector<WordStep> w;
            for (int k = 0; k < 3; ++k) {
                double t = static_cast<double>(static_cast<int>(rng() % 13) - 6) / 5;
                w.push_back({static_cast<std::size_t>(rng() % base.dim), false, Rational(0), t});
            }
            Eigen::VectorXd img = oc.apply_word(w, to_eigen(v));
            std::vector<double> iv(img.data(), img.data() + img.size());
            NormalForm b = oc.normal_form(iv);
            CHECK_MESSAGE(b.residual <= 1e-9, label);
            CHECK_MESSAGE(same_class(a, b, 1e-6), label << ": " << oc.describe(a) << " vs " << oc.describe(b));
        }
    }
}

TEST_CASE("constructed systems pass their own audit") {
    for (const auto& [label, param] : classes()) {
        auto q = canonical_algebra(label, param);
        OrbitClassifier oc(q);
        AuditOptions opts;
        opts.samples = 200;
        opts.seed = 99;
        auto rep = verify_candidate_system(oc, oc.optimal_system(), opts);
        CHECK_MESSAGE(rep.pairs.empty(), label << "\n" << rep.render(oc));
        CHECK_MESSAGE(rep.gaps.empty(), label << "\n" << rep.render(oc));
        CHECK_MESSAGE(rep.duplicates.empty(), label << "\n" << rep.render(oc));
        CHECK_MESSAGE(rep.undecided_rate() < 0.01, label);
    }
}

TEST_CASE("audit flags an adjoined adjoint image") {
    auto q = eq5_at(2, 3);
    OrbitClassifier oc(q);
    auto sys = oc.optimal_system();
    REQUIRE(sys.size() == 4);
    // Ad(exp X1) applied to the X3 representative
    auto x3 = sys[0].vector();
    auto img = exp_nilpotent(q.ad({1, 0, 0}), Rational(1)) * x3;
    sys.push_back(make_rep(img));
    AuditOptions opts;
    opts.samples = 300;
    auto rep = verify_candidate_system(oc, sys, opts);
    REQUIRE(rep.pairs.size() == 1);
    CHECK(rep.pairs[0].a == 0);
    CHECK(rep.pairs[0].b == 4);
    CHECK(rep.pairs[0].witness.residual <= 1e-9);
    CHECK(rep.gaps.empty());
    CHECK_FALSE(rep.duplicates.empty());
    auto text = rep.render(oc);
    CHECK(text.find("1 ~ 5") != std::string::npos);
    CHECK(text.find("seed: ") != std::string::npos);
}

TEST_CASE("audit finds gaps when a family is frozen to signs") {
    auto q = canonical_algebra("2A2");
    OrbitClassifier oc(q);
    auto frozen = parse_candidates("X2 + delta*X4 | delta in {-1,1}\nX4\nX2 + eps*X3 | eps in {-1,1}\n"
                                   "X4 + eps*X1 | eps in {-1,1}\nX1\nX3\nX1 + eps*X3 | eps in {-1,1}\n",
                                   4);
    AuditOptions opts;
    opts.samples = 200;
    auto rep = verify_candidate_system(oc, frozen, opts);
    CHECK_FALSE(rep.gaps.empty());
    CHECK(rep.pairs.empty());
    CHECK(rep.render(oc).find("gap count: ") != std::string::npos);
}

TEST_CASE("audit is deterministic and thread independent") {
    auto q = eq5_at(2, 3);
    OrbitClassifier oc(q);
    auto sys = oc.optimal_system();
    sys.pop_back();
    AuditOptions one;
    one.samples = 200;
    one.seed = 4242;
    AuditOptions four = one;
    four.jobs = 4;
    auto a = verify_candidate_system(oc, sys, one), b = verify_candidate_system(oc, sys, four);
    CHECK(a.render(oc) == b.render(oc));
    CHECK_FALSE(a.gaps.empty());
}

TEST_CASE("candidate parsing") {
    auto c = parse_candidates("# comment\nX1 + k*X3 | k != 0\n\n2*X2 - X1\nX3 + a*X1 | a >= 0; b in {0,2}\n", 3);
    REQUIRE(c.size() == 3);
    CHECK(c[0].params.at(0).kind == ParamKind::NonZero);
    CHECK(c[1].vector() == std::vector<Rational>{-1, 2, 0});
    CHECK(c[2].params.size() == 2);
    CHECK(kind_of([] { parse_candidates("X1 + X4", 3); }) == ErrorKind::Schema);
    CHECK(kind_of([] { parse_candidates("X1*X2", 3); }) == ErrorKind::Schema);
    CHECK(kind_of([] { parse_candidates("X1 + 1", 3); }) == ErrorKind::Schema);
    CHECK(kind_of([] { parse_candidates("X1 | k ~ 3", 3); }) == ErrorKind::Schema);
    CHECK(kind_of([] {
              auto q = canonical_algebra("A3,2");
              verify_candidate_system(q, parse_candidates("k^2*X1 + X2", 3));
          }) == ErrorKind::Domain);
}

TEST_CASE("unsupported classes") {
    CHECK(kind_of([] { OrbitClassifier oc(QAlgebra(5)); }) == ErrorKind::UnsupportedClass);
    // filiform [e2,e4] = e1, [e3,e4] = e2 is not encoded
    QAlgebra four(4);
    four.C(1, 3, 0) = 1;
    four.C(3, 1, 0) = -1;
    four.C(2, 3, 1) = 1;
    four.C(3, 2, 1) = -1;
    auto k = kind_of([&] { OrbitClassifier oc(four); });
    CHECK((k == ErrorKind::UnsupportedClass || k == ErrorKind::Unidentified));
}
