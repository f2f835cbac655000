#pragma once

#include "liesym/adjoint.hpp"
#include "liesym/lie_algebra.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace liesym {

enum class ParamKind { Real, NonZero, Positive, NonNegative, Set, Interval };

struct ParamSpec {
    std::string name;
    ParamKind kind = ParamKind::Real;
    std::vector<Rational> values;  // Set
    double lower = 0, upper = 0;   // Interval: lower <= v < upper
    std::string upper_text;        // Interval bound as written

    bool admits(double v) const;
    std::string render() const;
    static ParamSpec sign(const std::string& name) { return {name, ParamKind::Set, {Rational(-1), Rational(1)}}; }
};

/// One-dimensional subalgebra (or a family of them): span of sum coeffs[i] X_i,
/// coefficients affine in the named parameters.
struct SubalgebraRep {
    std::vector<Expr> coeffs;
    std::vector<ParamSpec> params;

    std::size_t dim() const { return coeffs.size(); }
    bool concrete() const { return params.empty(); }
    /// Concrete vector; throws Domain for families.
    std::vector<Rational> vector() const;
    std::string render(const std::string& prefix = "X") const;
};

SubalgebraRep make_rep(const std::vector<Rational>& v);
/// Lines "X1 + delta*X2 | delta in {-1,1}" ('#' comments). Constraint forms:
/// "k in R", "k in {a,b,...}", "k != 0", "k > 0", "k >= 0"; several
/// separated by ';'. Unconstrained names are real.
std::vector<SubalgebraRep> parse_candidates(const std::string& text, std::size_t dim, const std::string& prefix = "X");

struct WordStep {
    std::size_t generator = 0;  // index into the catalog basis of the class
    bool exact = true;
    Rational q;                 // exact value
    double value = 0;           // numeric value (always set)
};

struct ConjugacyWitness {
    std::vector<WordStep> word;  // applied left to right
    double residual = 0;         // projective mismatch after applying the word
    bool exact = false;          // residual is exactly zero
};

struct ParamValue {
    double value = 0;
    std::optional<Rational> exact;
};

/// Adjoint-orbit normal form of a line: entry of the optimal system, its
/// parameter values, and a word taking the line onto the entry.
struct NormalForm {
    std::size_t entry = 0;
    std::vector<ParamValue> params;
    std::vector<WordStep> word;
    double residual = 0;
};
bool same_class(const NormalForm& a, const NormalForm& b, double tol = 1e-9);

/// An identified algebra with the orbit classification of its class.
class OrbitClassifier {
public:
    /// Identifies q. Throws UnsupportedClass when no orbit strategy is encoded.
    explicit OrbitClassifier(const QAlgebra& q);

    const QAlgebra& algebra() const { return q_; }
    const AlgebraLabel& label() const { return label_; }
    const QAlgebra& canonical() const { return can_; }
    /// Optimal system in the catalog basis e1..en.
    const std::vector<SubalgebraRep>& entries() const { return entries_; }
    /// Optimal system in the input basis.
    std::vector<SubalgebraRep> optimal_system() const;

    NormalForm normal_form(const std::vector<Rational>& v) const;
    NormalForm normal_form(const std::vector<double>& v) const;
    /// Catalog-basis vector of entry e at the given parameters.
    std::vector<double> entry_vector(std::size_t e, const std::vector<ParamValue>& params) const;
    /// Applies a word in the input basis (numerically).
    Eigen::VectorXd apply_word(const std::vector<WordStep>& w, const Eigen::VectorXd& v) const;
    /// Exact application when every step is exact and nilpotent.
    std::optional<std::vector<Rational>> apply_word_exact(const std::vector<WordStep>& w,
                                                          const std::vector<Rational>& v) const;
    /// Generator of a word step in the input basis.
    std::vector<Rational> generator(std::size_t i) const { return w_.col(i); }
    std::string render_word(const std::vector<WordStep>& w, const std::string& prefix = "X") const;
    std::string describe(const NormalForm& nf) const;

private:
    template <class T>
    NormalForm classify(const std::vector<T>& canon) const;
    double check(NormalForm& nf, const Eigen::VectorXd& input) const;

    QAlgebra q_;
    AlgebraLabel label_;
    QAlgebra can_;
    QMatrix w_, winv_;
    std::vector<SubalgebraRep> entries_;
    std::vector<Eigen::MatrixXd> ad_;  // ad of catalog basis elements in the input basis
    std::size_t ray_entries_ = 0;      // for K+A1: entries of K come first
};

double projective_residual(const Eigen::VectorXd& a, const Eigen::VectorXd& b);
std::vector<WordStep> inverse(const std::vector<WordStep>& w);

enum class ConjugacyStatus { Conjugate, NotConjugate, Undecided };
const char* to_string(ConjugacyStatus s);

struct ConjugacyVerdict {
    ConjugacyStatus verdict = ConjugacyStatus::Undecided;
    std::optional<ConjugacyWitness> witness;
    std::string invariant;  // separating invariant for NotConjugate
    std::string value_v, value_w;
};

/// Orbit invariants independent of the class strategy: derived and lower
/// central series depth, center membership, the line modulo the derived
/// algebra, and the projective spectrum of ad. The first differing one (or
/// nullopt) as (name, value for v, value for w).
struct InvariantDifference {
    std::string name, value_v, value_w;
};
std::optional<InvariantDifference> separating_invariant(const QAlgebra& q, const std::vector<Rational>& v,
                                                        const std::vector<Rational>& w);

ConjugacyVerdict are_conjugate(const OrbitClassifier& c, const std::vector<Rational>& v, const std::vector<Rational>& w);
ConjugacyVerdict are_conjugate(const QAlgebra& q, const std::vector<Rational>& v, const std::vector<Rational>& w);

std::vector<SubalgebraRep> construct_optimal_system(const QAlgebra& q);

struct AuditOptions {
    std::size_t samples = 1000;
    std::uint64_t seed = 0;  // 0: default_seed()
    unsigned jobs = 1;
};
/// LIESYM_SEED from the environment, else a fixed default.
std::uint64_t default_seed();

struct AuditPair {
    std::size_t a = 0, b = 0;
    std::vector<double> member_a, member_b;
    ConjugacyWitness witness;
};
struct AuditGap {
    std::size_t sample = 0;
    std::vector<Rational> direction;
    std::string normal_form;
};
struct AuditDuplicate {
    std::size_t sample = 0;
    std::vector<std::size_t> candidates;
};

struct AuditReport {
    std::string algebra;
    std::uint64_t seed = 0;
    std::size_t samples = 0;
    std::vector<SubalgebraRep> candidates;
    std::vector<AuditPair> pairs;
    std::vector<AuditGap> gaps;
    std::vector<AuditDuplicate> duplicates;
    std::size_t undecided = 0;
    double max_residual = 0;

    bool clean() const { return pairs.empty() && gaps.empty() && duplicates.empty() && undecided == 0; }
    double undecided_rate() const { return samples ? static_cast<double>(undecided) / samples : 0.0; }
    std::string render(const OrbitClassifier& c, const std::string& prefix = "X") const;
};

AuditReport verify_candidate_system(const OrbitClassifier& c, const std::vector<SubalgebraRep>& candidates,
                                    const AuditOptions& opts = {});
AuditReport verify_candidate_system(const QAlgebra& q, const std::vector<SubalgebraRep>& candidates,
                                    const AuditOptions& opts = {});

} // namespace liesym
