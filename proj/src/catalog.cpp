#include "liesym/catalog.hpp"

#include "liesym/embedded_data.hpp"
#include "liesym/error.hpp"
#include "liesym/lie_algebra.hpp"
#include "liesym/optimal.hpp"
#include "liesym/reduction.hpp"
#include "liesym/symmetry.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

namespace liesym {

using json = nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& where, const std::string& msg) {
    throw Error(ErrorKind::Schema, where + ": " + msg);
}

std::string str(const json& j, const std::string& key, const std::string& where, bool required = true) {
    if (!j.contains(key)) {
        if (required) schema(where, "missing field '" + key + "'");
        return "";
    }
    if (!j[key].is_string()) schema(where + "." + key, "expected a string");
    return j[key].get<std::string>();
}

std::vector<std::string> strings(const json& j, const std::string& key, const std::string& where) {
    std::vector<std::string> out;
    if (!j.contains(key)) return out;
    const json& a = j[key];
    if (!a.is_array()) schema(where + "." + key, "expected an array");
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_string()) schema(where + "." + key + "[" + std::to_string(i) + "]", "expected a string");
        out.push_back(a[i].get<std::string>());
    }
    return out;
}

std::optional<std::size_t> count(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) return std::nullopt;
    if (!j[key].is_number_unsigned()) schema(where + "." + key, "expected a nonnegative integer");
    return j[key].get<std::size_t>();
}

template <class Fn>
auto at(const std::string& where, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Schema) throw;
        schema(where, e.what());
    }
}

Expr expr_at(const std::string& text, const SymbolTable& syms, const std::string& where) {
    return at(where, [&] { return expand(parse(text, syms)); });
}

VectorField field_at(const std::string& text, const SymbolTable& syms, const std::string& where) {
    return at(where, [&] { return expand(parse_field(text, syms)); });
}

CatalogSample parse_sample(const json& j, const SymbolTable& syms, const std::string& where) {
    if (!j.is_object()) schema(where, "expected an object");
    CatalogSample s;
    if (j.contains("params")) {
        if (!j["params"].is_object()) schema(where + ".params", "expected an object");
        for (const auto& [k, v] : j["params"].items()) {
            std::string w = where + ".params." + k;
            if (!syms.declared(k) || syms.role(k) != SymbolTable::Role::Parameter) schema(w, "not a family parameter");
            if (!v.is_string()) schema(w, "expected a string");
            s.params[k] = expr_at(v.get<std::string>(), syms, w);
        }
    }
    s.branch = str(j, "branch", where, false);
    s.dim = count(j, "dim", where);
    if (j.contains("label")) s.label = str(j, "label", where);
    if (j.contains("label_param")) {
        Expr q = expr_at(str(j, "label_param", where), syms, where + ".label_param");
        if (!q.is_number()) schema(where + ".label_param", "expected a rational");
        s.label_param = q.value();
    }
    s.optimal_max = count(j, "optimal_max", where);
    s.optimal_size = count(j, "optimal_size", where);
    s.extra_text = strings(j, "extra_generators", where);
    s.candidates = strings(j, "candidates", where);
    return s;
}

CatalogCase parse_case(const json& j, const SymbolTable& syms, const std::string& where) {
    if (!j.is_object()) schema(where, "expected an object");
    CatalogCase c;
    c.id = str(j, "id", where);
    c.aliases = strings(j, "aliases", where);
    c.anchor = str(j, "anchor", where);
    c.notes = str(j, "notes", where, false);
    if (!j.contains("instance") || !j["instance"].is_object()) schema(where, "missing object 'instance'");
    const json& in = j["instance"];
    std::map<std::string, Expr> inst;
    for (const char* k : {"m", "p", "b0", "b1", "c0", "c1"})
        inst[k] = expr_at(str(in, k, where + ".instance"), syms, where + ".instance." + k);
    for (const auto& [k, v] : in.items())
        if (!inst.count(k)) schema(where + ".instance." + k, "unknown coefficient");
    c.instance = {inst["m"], inst["p"], inst["b0"], inst["b1"], inst["c0"], inst["c1"]};
    c.generator_text = strings(j, "generators", where);
    if (c.generator_text.empty()) schema(where, "no generators");
    for (std::size_t i = 0; i < c.generator_text.size(); ++i)
        c.generators.push_back(field_at(c.generator_text[i], syms, where + ".generators[" + std::to_string(i) + "]"));
    c.refuted_text = strings(j, "refuted", where);
    for (std::size_t i = 0; i < c.refuted_text.size(); ++i)
        c.refuted.push_back(field_at(c.refuted_text[i], syms, where + ".refuted[" + std::to_string(i) + "]"));
    c.solutions = strings(j, "solutions", where);
    c.nonsolutions = strings(j, "nonsolutions", where);
    for (std::size_t i = 0; i < c.solutions.size(); ++i)
        expr_at(c.solutions[i], syms, where + ".solutions[" + std::to_string(i) + "]");
    for (std::size_t i = 0; i < c.nonsolutions.size(); ++i)
        expr_at(c.nonsolutions[i], syms, where + ".nonsolutions[" + std::to_string(i) + "]");
    if (j.contains("exponential")) {
        if (!j["exponential"].is_boolean()) schema(where + ".exponential", "expected a boolean");
        c.exponential = j["exponential"].get<bool>();
    }
    if (j.contains("samples")) {
        if (!j["samples"].is_array()) schema(where + ".samples", "expected an array");
        for (std::size_t i = 0; i < j["samples"].size(); ++i) {
            std::string w = where + ".samples[" + std::to_string(i) + "]";
            CatalogSample s = parse_sample(j["samples"][i], syms, w);
            for (std::size_t k = 0; k < s.extra_text.size(); ++k)
                field_at(s.extra_text[k], syms, w + ".extra_generators[" + std::to_string(k) + "]");
            c.samples.push_back(std::move(s));
        }
    }
    return c;
}

} // namespace

bool CatalogCase::matches(const std::string& name) const {
    return id == name || std::find(aliases.begin(), aliases.end(), name) != aliases.end();
}

DCRInstance CatalogCase::instance_at(const CatalogSample& s) const {
    auto sub = [&](const Expr& e) { return expand(substitute(e, s.params)); };
    return {sub(instance.m), sub(instance.p), sub(instance.b0), sub(instance.b1), sub(instance.c0), sub(instance.c1)};
}

std::vector<VectorField> CatalogCase::generators_at(const CatalogSample& s) const {
    std::vector<VectorField> out;
    for (const auto& g : generators) out.push_back(expand(substitute(g, s.params)));
    SymbolTable syms = catalog_symbols();
    for (const auto& t : s.extra_text) out.push_back(expand(substitute(parse_field(t, syms), s.params)));
    return out;
}

SymbolTable catalog_symbols() { return SymbolTable::standard(); }

std::vector<CatalogCase> parse_catalog(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Schema, std::string("byte ") + std::to_string(e.byte) + ": malformed JSON");
    }
    if (!doc.is_object()) schema("document", "expected an object");
    if (str(doc, "schema", "document") != "liesym-catalog/1") schema("schema", "unsupported schema version");
    if (!doc.contains("cases") || !doc["cases"].is_array()) schema("document", "missing array 'cases'");
    SymbolTable syms = catalog_symbols();
    std::vector<CatalogCase> out;
    for (std::size_t i = 0; i < doc["cases"].size(); ++i) {
        CatalogCase c = parse_case(doc["cases"][i], syms, "cases[" + std::to_string(i) + "]");
        for (const auto& o : out)
            if (o.matches(c.id) || std::any_of(c.aliases.begin(), c.aliases.end(), [&](const std::string& a) { return o.matches(a); }))
                schema("cases[" + std::to_string(i) + "]", "duplicate case name '" + c.id + "'");
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<CatalogCase> load_catalog(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Usage, "cannot read catalog " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_catalog(ss.str());
}

const std::vector<CatalogCase>& default_catalog() {
    static const std::vector<CatalogCase> cat = parse_catalog(std::string(embedded::catalog_json));
    return cat;
}

const CatalogCase& find_case(const std::vector<CatalogCase>& cat, const std::string& name) {
    for (const auto& c : cat)
        if (c.matches(name)) return c;
    throw Error(ErrorKind::Usage, "no catalog case '" + name + "'");
}

bool CaseResult::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const RegressionCheck& c) { return c.passed; });
}

bool RegressionReport::passed() const { return failures() == 0; }

std::size_t RegressionReport::failures() const {
    return static_cast<std::size_t>(std::count_if(cases.begin(), cases.end(), [](const CaseResult& c) { return !c.passed(); }));
}

std::string RegressionReport::render() const {
    std::ostringstream os;
    os << "seed: " << seed << "\n";
    os << "audit samples: " << audit_samples << "\n";
    for (const auto& c : cases) {
        os << "case " << c.id << ": " << (c.passed() ? "pass" : "FAIL") << "\n";
        for (const auto& k : c.checks) {
            os << "  [" << (k.passed ? "ok" : "FAIL") << "] " << k.name;
            if (!k.detail.empty()) os << " -- " << k.detail;
            os << "\n";
        }
    }
    os << "cases: " << cases.size() << ", failed: " << failures() << "\n";
    return os.str();
}

namespace {

std::string where_of(const CatalogSample& s) {
    if (s.params.empty()) return "()";
    std::string out = "(";
    bool first = true;
    for (const auto& [k, v] : s.params) {
        if (!first) out += ",";
        out += k + "=" + render(v);
        first = false;
    }
    return out + ")";
}

bool has_symbols(const DCRInstance& in) {
    for (const auto& [k, v] : to_map(in))
        if (!free_symbols(v).empty()) return true;
    return false;
}

void symmetry_checks(CaseResult& out, const std::string& at, const EvolutionPDE& pde,
                     const std::vector<VectorField>& gens, const std::vector<VectorField>& refuted) {
    for (std::size_t i = 0; i < gens.size(); ++i) {
        auto v = is_symmetry(pde, gens[i]);
        bool ok = v.verdict == SymmetryStatus::Symmetry && v.residual.is_zero();
        out.checks.push_back({at + " symmetry X" + std::to_string(i + 1), ok,
                              ok ? "" : std::string(to_string(v.verdict)) + ", residual " + render(v.residual)});
    }
    for (std::size_t i = 0; i < refuted.size(); ++i) {
        auto v = is_symmetry(pde, refuted[i]);
        bool ok = v.verdict == SymmetryStatus::NotSymmetry;
        out.checks.push_back({at + " refuted field " + std::to_string(i + 1), ok,
                              std::string(to_string(v.verdict)) + ", residual " + render(v.residual)});
    }
}

template <class Fn>
void guarded(CaseResult& out, const std::string& name, Fn&& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        out.checks.push_back({name, false, e.what()});
    }
}

void run_sample(CaseResult& out, const CatalogCase& c, const CatalogSample& s, const RegressionOptions& opts) {
    std::string at = where_of(s);
    if (!s.branch.empty()) at += " [" + s.branch + "]";
    DCRInstance inst = c.instance_at(s);
    EvolutionPDE pde = build_dcr(inst);
    std::vector<VectorField> gens;
    guarded(out, at + " generators", [&] { gens = c.generators_at(s); });
    std::vector<VectorField> refuted;
    for (const auto& r : c.refuted) refuted.push_back(expand(substitute(r, s.params)));
    symmetry_checks(out, at, pde, gens, refuted);

    if (s.dim) {
        guarded(out, at + " find-symmetries", [&] {
            FindOptions fo;
            fo.exponential = c.exponential;
            auto found = find_symmetries(pde, fo);
            bool ok = found.generators.size() == *s.dim;
            std::string detail = std::to_string(found.generators.size()) + " generators";
            if (!found.superposition.empty()) detail += " (+" + std::to_string(found.superposition.size()) + " superposition)";
            out.checks.push_back({at + " find-symmetries dim " + std::to_string(*s.dim), ok, detail});
        });
    }

    LieAlgebra alg;
    bool closed = false;
    guarded(out, at + " closure", [&] {
        alg = structure_constants(gens);
        bool jac = check_jacobi(alg);
        if (s.dim && gens.size() != *s.dim)
            out.checks.push_back({at + " claimed basis size", false, std::to_string(gens.size()) + " fields"});
        out.checks.push_back({at + " closure and Jacobi", jac, jac ? "" : "Jacobi identity fails"});
        closed = jac;
    });
    if (!closed) return;

    if (s.label) {
        guarded(out, at + " identification", [&] {
            AlgebraLabel got = identify(to_rational(alg));
            bool ok = got.name == *s.label && got.param == s.label_param;
            out.checks.push_back({at + " identifies as " + *s.label, ok, got.render()});
        });
    }

    if (s.optimal_max || s.optimal_size || !s.candidates.empty()) {
        guarded(out, at + " optimal system", [&] {
            OrbitClassifier oc(to_rational(alg));
            AuditOptions ao;
            ao.samples = opts.audit_samples;
            ao.seed = opts.seed;
            if (s.optimal_max || s.optimal_size) {
                auto sys = oc.optimal_system();
                bool ok = s.optimal_size ? sys.size() == *s.optimal_size : sys.size() <= *s.optimal_max;
                std::string want = s.optimal_size ? "= " + std::to_string(*s.optimal_size) : "<= " + std::to_string(*s.optimal_max);
                out.checks.push_back({at + " optimal system size " + want, ok, std::to_string(sys.size()) + " entries"});
                auto rep = verify_candidate_system(oc, sys, ao);
                out.checks.push_back({at + " optimal system audit", rep.clean(),
                                      std::to_string(rep.pairs.size()) + " pairs, " + std::to_string(rep.gaps.size()) +
                                          " gaps, " + std::to_string(rep.undecided) + " undecided"});
            }
            if (!s.candidates.empty()) {
                std::string text;
                for (const auto& l : s.candidates) text += l + "\n";
                auto cand = parse_candidates(text, alg.dim);
                auto rep = verify_candidate_system(oc, cand, ao);
                std::string detail = std::to_string(cand.size()) + " candidates, " + std::to_string(rep.pairs.size()) +
                                     " pairs, " + std::to_string(rep.gaps.size()) + " gaps, " +
                                     std::to_string(rep.undecided) + " undecided";
                for (const auto& p : rep.pairs)
                    detail += "; pair (" + std::to_string(p.a + 1) + "," + std::to_string(p.b + 1) + ") by " +
                              oc.render_word(p.witness.word);
                out.checks.push_back({at + " candidate system audit", rep.clean(), detail});
            }
        });
    }
}

} // namespace

CaseResult run_case(const CatalogCase& c, const RegressionOptions& opts) {
    CaseResult out;
    out.id = c.id;
    guarded(out, "case", [&] {
        EvolutionPDE pde = build_dcr(c.instance);
        if (has_symbols(c.instance)) {
            symmetry_checks(out, "symbolic", pde, c.generators, {});
            guarded(out, "symbolic closure", [&] {
                LieAlgebra alg = structure_constants(c.generators);
                out.checks.push_back({"symbolic closure and Jacobi", check_jacobi(alg), ""});
            });
        }
        SymbolTable syms = catalog_symbols();
        for (const auto& t : c.solutions) {
            auto v = verify_solution(pde, parse(t, syms));
            out.checks.push_back({"solution " + t, v.verdict == SolutionStatus::Solution,
                                  std::string(to_string(v.verdict)) + ", residual " + render(v.residual)});
        }
        for (const auto& t : c.nonsolutions) {
            auto v = verify_solution(pde, parse(t, syms));
            out.checks.push_back({"non-solution " + t, v.verdict == SolutionStatus::NotSolution,
                                  std::string(to_string(v.verdict)) + ", residual " + render(v.residual)});
        }
        for (const auto& s : c.samples) run_sample(out, c, s, opts);
    });
    return out;
}

RegressionReport run_regression(const std::vector<CatalogCase>& cat, const RegressionOptions& opts) {
    RegressionReport rep;
    rep.seed = opts.seed ? opts.seed : default_seed();
    rep.audit_samples = opts.audit_samples;
    RegressionOptions o = opts;
    o.seed = rep.seed;
    rep.cases.resize(cat.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < cat.size(); i = next++) rep.cases[i] = run_case(cat[i], o);
    };
    unsigned jobs = std::max(1u, std::min<unsigned>(opts.jobs, static_cast<unsigned>(cat.size())));
    if (jobs <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    return rep;
}

} // namespace liesym
