#pragma once

#include "liesym/jet.hpp"
#include "liesym/parser.hpp"
#include "liesym/pde.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace liesym {

/// Parameter instantiation of a case and the facts claimed there.
struct CatalogSample {
    std::map<std::string, Expr> params;
    std::string branch;  // exceptional-value condition, empty for generic samples
    std::optional<std::size_t> dim;  // number of independent generators found
    std::optional<std::string> label;
    std::optional<Rational> label_param;
    std::optional<std::size_t> optimal_max;   // optimal system has at most this many entries
    std::optional<std::size_t> optimal_size;  // ... exactly this many
    std::vector<std::string> extra_text;      // generators only present on the branch
    std::vector<std::string> candidates;      // candidate optimal system, audited
};

struct CatalogCase {
    std::string id;
    std::vector<std::string> aliases;
    std::string anchor;
    std::string notes;
    DCRInstance instance;
    std::vector<std::string> generator_text;
    std::vector<VectorField> generators;  // symbolic in the instance parameters
    std::vector<std::string> refuted_text;
    std::vector<VectorField> refuted;     // claimed fields that must not be symmetries
    std::vector<std::string> solutions;
    std::vector<std::string> nonsolutions;
    bool exponential = false;  // find-symmetries with exponential rates
    std::vector<CatalogSample> samples;

    bool matches(const std::string& name) const;
    /// Instance with the sample parameters substituted.
    DCRInstance instance_at(const CatalogSample& s) const;
    std::vector<VectorField> generators_at(const CatalogSample& s) const;
};

/// Parameters of the family and w; every case expression is read with it.
SymbolTable catalog_symbols();

/// Throws Schema with the location ("cases[2].generators[1]: ...").
std::vector<CatalogCase> parse_catalog(const std::string& text);
std::vector<CatalogCase> load_catalog(const std::string& path);
/// The catalog compiled into the library.
const std::vector<CatalogCase>& default_catalog();
/// By id or alias; throws Usage.
const CatalogCase& find_case(const std::vector<CatalogCase>& cat, const std::string& name);

struct RegressionCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct CaseResult {
    std::string id;
    std::vector<RegressionCheck> checks;
    bool passed() const;
};

struct RegressionOptions {
    unsigned jobs = 1;
    std::size_t audit_samples = 1000;
    std::uint64_t seed = 0;  // 0: default_seed()
};

struct RegressionReport {
    std::vector<CaseResult> cases;
    std::uint64_t seed = 0;
    std::size_t audit_samples = 0;
    bool passed() const;
    std::size_t failures() const;
    std::string render() const;
};

/// Re-derives every claim of every case; cases run in parallel.
RegressionReport run_regression(const std::vector<CatalogCase>& cat, const RegressionOptions& opts = {});
CaseResult run_case(const CatalogCase& c, const RegressionOptions& opts = {});

} // namespace liesym
