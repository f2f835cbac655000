#include "liesym/algebra_catalog.hpp"
#include "liesym/catalog.hpp"
#include "liesym/equivalence.hpp"
#include "liesym/error.hpp"
#include "liesym/lie_algebra.hpp"
#include "liesym/optimal.hpp"
#include "liesym/reduction.hpp"
#include "liesym/report.hpp"
#include "liesym/symmetry.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

using namespace liesym;
using ojson = nlohmann::ordered_json;

namespace {

struct Common {
    std::string params;
    std::string out;
    std::string catalog;
};

struct Opts {
    Common common;
    std::string pde, field, sol, eps = "eps", et;
    std::string instance, a, b, coefficient;
    std::string algebra, fields, candidates;
    std::string phi;
    bool exponential = false, remove_drift_flag = false;
    int degree = 2;
    std::size_t samples = 1000;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
};

[[noreturn]] void usage(const std::string& msg) { throw Error(ErrorKind::Usage, msg); }

SymbolTable symbols(const Opts& o) {
    SymbolTable s = SymbolTable::standard();
    if (!o.common.params.empty()) parse_params(o.common.params, s);
    return s;
}

const std::vector<CatalogCase>& catalog(const Opts& o) {
    static std::vector<CatalogCase> loaded;
    if (o.common.catalog.empty()) return default_catalog();
    if (loaded.empty()) loaded = load_catalog(o.common.catalog);
    return loaded;
}

std::optional<std::string> case_name(const std::string& text) {
    if (text.rfind("case:", 0) == 0) return text.substr(5);
    return std::nullopt;
}

DCRInstance substituted(const DCRInstance& in, const std::map<std::string, Expr>& b) {
    auto s = [&](const Expr& e) { return expand(substitute(e, b)); };
    return {s(in.m), s(in.p), s(in.b0), s(in.b1), s(in.c0), s(in.c1)};
}

struct PdeInput {
    EvolutionPDE pde;
    std::optional<DCRInstance> instance;
};

PdeInput pde_of(const Opts& o, const SymbolTable& syms) {
    if (o.pde.empty()) usage("--pde is required");
    if (auto name = case_name(o.pde)) {
        const CatalogCase& c = find_case(catalog(o), *name);
        DCRInstance in = substituted(c.instance, syms.assignments());
        return {build_dcr(in), in};
    }
    return {make_pde(parse_evolution_rhs(o.pde, syms)), std::nullopt};
}

std::string render_pde(const EvolutionPDE& p) { return "u_t = " + render(p.rhs); }

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep))
        if (item.find_first_not_of(" \t") != std::string::npos) out.push_back(item);
    return out;
}

struct AlgebraInput {
    QAlgebra q;
    LieAlgebra symbolic;
    std::vector<VectorField> basis;
    std::string description;
};

AlgebraInput algebra_of(const Opts& o, const SymbolTable& syms, bool need_rational = true) {
    AlgebraInput a;
    if (!o.fields.empty()) {
        for (const auto& f : split(o.fields, ';')) a.basis.push_back(expand(parse_field(f, syms)));
        a.description = o.fields;
    } else if (auto name = case_name(o.algebra)) {
        const CatalogCase& c = find_case(catalog(o), *name);
        for (const auto& g : c.generators) a.basis.push_back(expand(substitute(g, syms.assignments())));
        a.description = "case " + c.id;
    } else if (o.algebra.rfind("label:", 0) == 0) {
        std::string spec = o.algebra.substr(6);
        std::optional<Rational> param;
        if (auto eq = spec.find('='); eq != std::string::npos) {
            param = parse_rational(spec.substr(eq + 1));
            spec = spec.substr(0, eq);
        }
        a.q = canonical_algebra(spec, param);
        a.symbolic = to_expr(a.q);
        a.description = o.algebra;
        return a;
    } else {
        usage("give --fields \"X1; X2; ...\" or --algebra case:ID or --algebra label:NAME[=a]");
    }
    a.symbolic = structure_constants(a.basis);
    if (need_rational) {
        try {
            a.q = to_rational(a.symbolic);
        } catch (const Error&) {
            usage("structure constants are symbolic; assign the parameters with --params");
        }
    }
    return a;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) usage("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ojson field_list(const std::vector<VectorField>& fs) {
    ojson a = ojson::array();
    for (const auto& f : fs) a.push_back(render(f));
    return a;
}

ojson et_json(const ET& g) {
    ojson j = ojson::object();
    const char* names[] = {"k0", "k1", "k2", "g", "d0", "d1", "d2"};
    auto p = params(g);
    for (std::size_t i = 0; i < 7; ++i) j[names[i]] = render(p[i]);
    return j;
}

ET parse_et(const std::string& text, const SymbolTable& syms) {
    std::array<Expr, 7> p = params(ET::identity());
    const char* names[] = {"k0", "k1", "k2", "g", "d0", "d1", "d2"};
    for (const auto& item : split(text, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) usage("transformation entries are name=value: " + item);
        std::string key = item.substr(0, eq);
        key.erase(0, key.find_first_not_of(' '));
        key.erase(key.find_last_not_of(' ') + 1);
        std::size_t i = 0;
        while (i < 7 && key != names[i]) ++i;
        if (i == 7) usage("unknown transformation entry '" + key + "'");
        p[i] = parse(item.substr(eq + 1), syms);
    }
    ET g = from_params(p);
    check_invertible(g);
    return g;
}

ojson matrix_json(const QMatrix& m) {
    ojson rows = ojson::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        ojson r = ojson::array();
        for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(render(m(i, j)));
        rows.push_back(r);
    }
    return rows;
}

std::uint64_t seed_of(const Opts& o) { return o.seed ? o.seed : default_seed(); }

// ---- commands ----

void verify_symmetry(const Opts& o, Report& r) {
    SymbolTable syms = symbols(o);
    auto in = pde_of(o, syms);
    if (o.field.empty()) usage("--field is required");
    VectorField x = expand(parse_field(o.field, syms));
    r.inputs["pde"] = render_pde(in.pde);
    r.inputs["field"] = render(x);
    auto v = is_symmetry(in.pde, x);
    r.verdict = to_string(v.verdict);
    r.outcome = v.verdict == SymmetryStatus::Symmetry      ? Outcome::Verified
                : v.verdict == SymmetryStatus::NotSymmetry ? Outcome::Refuted
                                                           : Outcome::Undecided;
    r.certificates["residual"] = render(v.residual);
    r.say("pde: " + render_pde(in.pde));
    r.say("field: " + render(x));
    r.say("residual: " + render(v.residual));
}

void find_syms(const Opts& o, Report& r) {
    SymbolTable syms = symbols(o);
    auto in = pde_of(o, syms);
    FindOptions fo;
    fo.degree = o.degree;
    fo.exponential = o.exponential;
    r.inputs["pde"] = render_pde(in.pde);
    r.inputs["degree"] = o.degree;
    r.inputs["exponential"] = o.exponential;
    auto res = find_symmetries(in.pde, fo);
    ojson gens = ojson::array();
    bool all_zero = true;
    r.say("pde: " + render_pde(in.pde));
    for (std::size_t i = 0; i < res.generators.size(); ++i) {
        auto v = is_symmetry(in.pde, res.generators[i]);
        all_zero = all_zero && v.residual.is_zero();
        gens.push_back({{"field", render(res.generators[i])}, {"residual", render(v.residual)}});
        r.say("X" + std::to_string(i + 1) + " = " + render(res.generators[i]));
    }
    r.certificates["generators"] = gens;
    r.certificates["superposition"] = field_list(res.superposition);
    if (!res.superposition.empty())
        r.say("superposition fields: " + std::to_string(res.superposition.size()) + " (b(t,x) Du, not counted)");
    ojson rates = ojson::array();
    for (const auto& q : res.t_rates) rates.push_back("t:" + render(q));
    for (const auto& q : res.x_rates) rates.push_back("x:" + render(q));
    r.certificates["exponential_rates"] = rates;
    r.certificates["unknowns"] = res.unknowns;
    r.certificates["equations"] = res.equations;
    ojson br = ojson::array();
    for (const auto& b : exponent_branches(in.pde)) {
        br.push_back({{"param", b.param}, {"value", render(b.value)}, {"condition", b.condition}});
        r.say("exceptional branch: " + b.param + " = " + render(b.value) + " (" + b.condition + ")");
    }
    r.certificates["branches"] = br;
    if (in.instance) {
        std::string flags = render(special_case_flags(*in.instance));
        if (!flags.empty()) r.say("flags: " + flags);
        r.certificates["flags"] = flags;
    }
    r.verdict = std::to_string(res.generators.size()) + " generators";
    r.say("dimension: " + std::to_string(res.generators.size()));
    r.outcome = all_zero ? Outcome::Verified : Outcome::Undecided;
}

void normalize(const Opts& o, Report& r) {
    SymbolTable syms = symbols(o);
    if (o.instance.empty() || o.coefficient.empty()) usage("--instance and --coefficient are required");
    DCRInstance in = parse_dcr(o.instance, syms);
    auto coef = parse_coefficient(o.coefficient);
    if (!coef) usage("coefficient must be b1, c0 or c1");
    r.inputs["instance"] = serialize(in);
    r.inputs["coefficient"] = to_string(*coef);
    try {
        auto n = normalize_coefficient(in, *coef);
        auto img = apply_et(n.witness, in);
        bool ok = img && *img == n.instance && build_dcr(n.instance).rhs == apply_et(n.witness, build_dcr(in)).rhs;
        r.verdict = serialize(n.instance);
        r.outcome = ok ? Outcome::Verified : Outcome::Undecided;
        r.certificates["witness"] = et_json(n.witness);
        r.certificates["system"] = n.system;
        r.certificates["witness_checked"] = ok;
        ojson signs = ojson::array();
        for (int s : n.reachable_signs) signs.push_back(s);
        r.certificates["reachable_signs"] = signs;
        r.say("normalized: " + serialize(n.instance));
        r.say("witness: " + render(n.witness));
        r.say("system: " + n.system);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NoScaling) throw;
        r.verdict = "no-scaling-exists";
        r.outcome = Outcome::Refuted;
        r.certificates["reason"] = e.what();
        r.say(e.what());
    }
}

void equiv(const Opts& o, Report& r) {
    SymbolTable syms = symbols(o);
    if (o.a.empty()) usage("--a is required");
    DCRInstance a = parse_dcr(o.a, syms);
    r.inputs["a"] = serialize(a);
    if (o.remove_drift_flag) {
        auto d = remove_drift(a);
        bool ok = apply_et(d.witness, build_dcr(a)).rhs == build_dcr(d.instance).rhs;
        r.verdict = serialize(d.instance);
        r.outcome = ok ? Outcome::Verified : Outcome::Refuted;
        r.certificates["witness"] = et_json(d.witness);
        r.certificates["canonical_equality"] = ok;
        r.say("drift-free: " + serialize(d.instance));
        r.say("witness: " + render(d.witness));
        return;
    }
    if (o.b.empty()) usage("give --b or --remove-drift");
    DCRInstance b = parse_dcr(o.b, syms);
    r.inputs["b"] = serialize(b);
    auto v = are_equivalent(a, b);
    r.verdict = to_string(v.verdict);
    r.outcome = v.verdict == EquivalenceStatus::Equivalent      ? Outcome::Verified
                : v.verdict == EquivalenceStatus::NotEquivalent ? Outcome::Refuted
                                                                : Outcome::Undecided;
    if (v.witness) {
        r.certificates["witness"] = et_json(*v.witness);
        r.say("witness: " + render(*v.witness));
    }
    r.certificates["reason"] = v.reason;
    if (!v.reason.empty()) r.say(v.reason);
}

void bracket_table(const Opts& o, Report& r) {
    SymbolTable syms = symbols(o);
    r.inputs["algebra"] = o.fields.empty() ? o.algebra : o.fields;
    try {
        auto a = algebra_of(o, syms, false);
        if (!a.basis.empty()) r.inputs["basis"] = field_list(a.basis);
        bool jac = check_jacobi(a.symbolic);
        std::string table = render_table(a.symbolic);
        r.certificates["table"] = table;
        r.certificates["jacobi"] = jac;
        for (const auto& l : split(table, '\n')) r.say(l);
        r.say(std::string("Jacobi identity: ") + (jac ? "holds" : "fails"));
        r.verdict = jac ? "closed" : "jacobi-fails";
        r.outcome = jac ? Outcome::Verified : Outcome::Refuted;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NotClosed && e.kind() != ErrorKind::DependentBasis) throw;
        r.verdict = to_string(e.kind());
        r.outcome = Outcome::Refuted;
        r.certificates["reason"] = e.what();
        r.say(e.what());
    }
}

void identify_cmd(const Opts& o, Report& r) {
    SymbolTable syms = symbols(o);
    auto a = algebra_of(o, syms);
    r.inputs["algebra"] = a.description;
    try {
        AlgebraLabel l = identify(a.q);
        r.verdict = l.render();
        r.outcome = Outcome::Verified;
        r.certificates["label"] = l.name;
        r.certificates["param"] = l.param ? ojson(render(*l.param)) : ojson(nullptr);
        r.certificates["witness"] = matrix_json(l.witness);
        bool ok = change_basis(a.q, l.witness) == canonical_algebra(l.name, l.param);
        r.certificates["witness_checked"] = ok;
        if (!ok) r.outcome = Outcome::Undecided;
        r.say("label: " + l.render());
        r.say("basis change (columns: catalog basis in the input basis):");
        for (const auto& line : split(l.witness.render(), '\n')) r.say("  " + line);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Unidentified && e.kind() != ErrorKind::UnsupportedClass) throw;
        r.verdict = to_string(e.kind());
        r.outcome = Outcome::Undecided;
        r.certificates["reason"] = e.what();
        r.say(e.what());
    }
}

ojson audit_json(const AuditReport& rep, const OrbitClassifier& oc) {
    ojson j;
    ojson pairs = ojson::array();
    for (const auto& p : rep.pairs)
        pairs.push_back({{"a", p.a + 1}, {"b", p.b + 1}, {"word", oc.render_word(p.witness.word)},
                         {"residual", p.witness.residual}, {"exact", p.witness.exact}});
    j["pairs"] = pairs;
    ojson gaps = ojson::array();
    for (const auto& g : rep.gaps) {
        ojson d = ojson::array();
        for (const auto& q : g.direction) d.push_back(render(q));
        gaps.push_back({{"sample", g.sample}, {"direction", d}, {"normal_form", g.normal_form}});
    }
    j["gaps"] = gaps;
    ojson dups = ojson::array();
    for (const auto& d : rep.duplicates) {
        ojson c = ojson::array();
        for (auto k : d.candidates) c.push_back(k + 1);
        dups.push_back({{"sample", d.sample}, {"candidates", c}});
    }
    j["duplicates"] = dups;
    j["samples"] = rep.samples;
    j["undecided"] = rep.undecided;
    j["max_residual"] = rep.max_residual;
    return j;
}

Outcome audit_outcome(const AuditReport& rep) {
    if (!rep.pairs.empty() || !rep.gaps.empty() || !rep.duplicates.empty()) return Outcome::Refuted;
    return rep.undecided ? Outcome::Undecided : Outcome::Verified;
}

void optimal_system(const Opts& o, Report& r) {
    SymbolTable syms = symbols(o);
    auto a = algebra_of(o, syms);
    r.inputs["algebra"] = a.description;
    OrbitClassifier oc(a.q);
    auto sys = oc.optimal_system();
    r.say("algebra: " + oc.label().render());
    ojson list = ojson::array();
    for (std::size_t i = 0; i < sys.size(); ++i) {
        list.push_back(sys[i].render());
        r.say(std::to_string(i + 1) + ". " + sys[i].render());
    }
    r.certificates["algebra"] = oc.label().render();
    r.certificates["entries"] = list;
    r.verdict = std::to_string(sys.size()) + " classes";
    r.outcome = Outcome::Verified;
    if (o.samples > 0) {
        AuditOptions ao;
        ao.samples = o.samples;
        ao.seed = seed_of(o);
        ao.jobs = o.jobs;
        r.seed = ao.seed;
        auto rep = verify_candidate_system(oc, sys, ao);
        r.certificates["audit"] = audit_json(rep, oc);
        r.say("audit: " + std::to_string(rep.pairs.size()) + " pairs, " + std::to_string(rep.gaps.size()) + " gaps, " +
              std::to_string(rep.undecided) + " undecided of " + std::to_string(rep.samples));
        r.outcome = audit_outcome(rep);
    }
}

void audit_system(const Opts& o, Report& r) {
    SymbolTable syms = symbols(o);
    auto a = algebra_of(o, syms);
    if (o.candidates.empty()) usage("--candidates FILE is required");
    r.inputs["algebra"] = a.description;
    r.inputs["candidates"] = o.candidates;
    OrbitClassifier oc(a.q);
    auto cand = parse_candidates(read_file(o.candidates), a.q.dim);
    ojson cj = ojson::array();
    for (const auto& c : cand) cj.push_back(c.render());
    r.inputs["candidate_list"] = cj;
    AuditOptions ao;
    ao.samples = o.samples;
    ao.seed = seed_of(o);
    ao.jobs = o.jobs;
    r.seed = ao.seed;
    auto rep = verify_candidate_system(oc, cand, ao);
    r.certificates = audit_json(rep, oc);
    for (const auto& l : split(rep.render(oc), '\n')) r.say(l);
    r.outcome = audit_outcome(rep);
    r.verdict = rep.clean() ? "optimal system confirmed"
                            : std::to_string(rep.pairs.size()) + " conjugate pairs, " + std::to_string(rep.gaps.size()) +
                                  " gaps, " + std::to_string(rep.duplicates.size()) + " duplicates";
}

void reduce_cmd(const Opts& o, Report& r) {
    SymbolTable syms = symbols(o);
    auto in = pde_of(o, syms);
    if (o.field.empty()) usage("--field is required");
    VectorField x = expand(parse_field(o.field, syms));
    r.inputs["pde"] = render_pde(in.pde);
    r.inputs["field"] = render(x);
    try {
        auto red = reduce_pde(in.pde, x);
        r.certificates["omega"] = render(red.invariants.omega);
        r.certificates["multiplier"] = render(red.invariants.multiplier);
        r.certificates["ode"] = render(red.ode);
        r.certificates["factor"] = render(red.factor);
        r.certificates["residual"] = render(red.residual);
        r.certificates["factorization"] = red.certificate;
        ojson as = ojson::array();
        for (const auto& e : red.invariants.assumptions) as.push_back(render(e) + " != 0");
        r.certificates["assumptions"] = as;
        r.say("omega = " + render(red.invariants.omega));
        r.say("u = " + render(red.invariants.multiplier) + " * phi(omega)");
        r.say("ode: " + render(red.ode) + " = 0");
        r.say("factor: " + render(red.factor));
        r.say(std::string("residual = factor * ode: ") + (red.certificate ? "yes" : "no"));
        r.verdict = render(red.ode) + " = 0";
        r.outcome = red.certificate ? Outcome::Verified : Outcome::Undecided;
        if (!o.phi.empty()) {
            Expr u = lift_solution(red, parse(o.phi, syms));
            auto v = verify_solution(in.pde, u);
            r.certificates["lifted"] = {{"u", render(u)}, {"verdict", to_string(v.verdict)}, {"residual", render(v.residual)}};
            r.say("lifted u = " + render(u) + ": " + to_string(v.verdict));
            if (v.verdict != SolutionStatus::Solution)
                r.outcome = v.verdict == SolutionStatus::NotSolution ? Outcome::Refuted : Outcome::Undecided;
        }
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NotASymmetry && e.kind() != ErrorKind::ReductionFailure) throw;
        r.verdict = to_string(e.kind());
        r.outcome = Outcome::Refuted;
        r.certificates["reason"] = e.what();
        r.say(e.what());
    }
}

void solution_outcome(Report& r, const SolutionVerdict& v) {
    r.verdict = to_string(v.verdict);
    r.outcome = v.verdict == SolutionStatus::Solution      ? Outcome::Verified
                : v.verdict == SolutionStatus::NotSolution ? Outcome::Refuted
                                                           : Outcome::Undecided;
    r.certificates["residual"] = render(v.residual);
    r.say("residual: " + render(v.residual));
}

void verify_sol(const Opts& o, Report& r) {
    SymbolTable syms = symbols(o);
    auto in = pde_of(o, syms);
    if (o.sol.empty()) usage("--sol is required");
    Expr u = parse(o.sol, syms);
    r.inputs["pde"] = render_pde(in.pde);
    r.inputs["sol"] = render(u);
    r.say("pde: " + render_pde(in.pde));
    r.say("u = " + render(u));
    solution_outcome(r, verify_solution(in.pde, u));
}

void transform_sol(const Opts& o, Report& r) {
    SymbolTable syms = symbols(o);
    auto in = pde_of(o, syms);
    if (o.sol.empty()) usage("--sol is required");
    if (!syms.declared(o.eps)) syms.declare_parameter(o.eps);
    Expr u = parse(o.sol, syms);
    r.inputs["pde"] = render_pde(in.pde);
    r.inputs["sol"] = render(u);
    Expr image;
    if (!o.field.empty()) {
        VectorField x = expand(parse_field(o.field, syms));
        Expr eps = parse(o.eps, syms);
        r.inputs["field"] = render(x);
        r.inputs["eps"] = render(eps);
        auto src = verify_solution(in.pde, u);
        r.certificates["input_verdict"] = to_string(src.verdict);
        image = transform_solution(u, x, eps);
    } else {
        ET g;
        if (o.remove_drift_flag) {
            if (!in.instance) usage("--remove-drift needs --pde case:ID");
            g = remove_drift(*in.instance).witness;
        } else if (!o.et.empty()) {
            g = parse_et(o.et, syms);
        } else {
            usage("give --field (and --eps), --et or --remove-drift");
        }
        r.inputs["et"] = et_json(g);
        EvolutionPDE starred = apply_et(g, in.pde);
        r.inputs["source_pde"] = render_pde(starred);
        auto src = verify_solution(starred, u);
        r.certificates["input_verdict"] = to_string(src.verdict);
        r.say("source: " + render_pde(starred) + ", u = " + render(u) + ": " + to_string(src.verdict));
        image = transform_solution(u, g);
    }
    image = expand(image);
    r.certificates["image"] = render(image);
    r.say("image: u = " + render(image));
    solution_outcome(r, verify_solution(in.pde, image));
}

void regress(const Opts& o, Report& r) {
    const auto& cat = catalog(o);
    RegressionOptions ro;
    ro.jobs = o.jobs;
    ro.audit_samples = o.samples;
    ro.seed = seed_of(o);
    r.inputs["catalog"] = o.common.catalog.empty() ? "built-in" : o.common.catalog;
    r.inputs["audit_samples"] = o.samples;
    r.seed = ro.seed;
    auto rep = run_regression(cat, ro);
    ojson cases = ojson::array();
    for (const auto& c : rep.cases) {
        ojson checks = ojson::array();
        for (const auto& k : c.checks) checks.push_back({{"name", k.name}, {"passed", k.passed}, {"detail", k.detail}});
        cases.push_back({{"id", c.id}, {"passed", c.passed()}, {"checks", checks}});
    }
    r.certificates["cases"] = cases;
    for (const auto& l : split(rep.render(), '\n')) r.say(l);
    r.verdict = rep.passed() ? "all cases pass" : std::to_string(rep.failures()) + " cases fail";
    r.outcome = rep.passed() ? Outcome::Verified : Outcome::Refuted;
}

Outcome outcome_of(ErrorKind k) {
    switch (k) {
    case ErrorKind::Syntax:
    case ErrorKind::UndeclaredSymbol:
    case ErrorKind::Usage:
    case ErrorKind::Schema:
    case ErrorKind::Domain:
    case ErrorKind::NotInFamily:
    case ErrorKind::OrderOverflow: return Outcome::Usage;
    case ErrorKind::NotASymmetry:
    case ErrorKind::ReductionFailure:
    case ErrorKind::NotClosed:
    case ErrorKind::DependentBasis:
    case ErrorKind::NoScaling:
    case ErrorKind::NonInvertible: return Outcome::Refuted;
    default: return Outcome::Undecided;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lie point symmetries of diffusion-convection-reaction equations"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tool_version()));
    Opts o;

    using Handler = std::function<void(const Opts&, Report&)>;
    std::vector<std::pair<CLI::App*, Handler>> commands;
    auto sub = [&](const std::string& name, const std::string& desc, Handler h) {
        CLI::App* s = app.add_subcommand(name, desc);
        s->add_option("--params", o.common.params, "parameters: name=value,name,...");
        s->add_option("--out", o.common.out, "write the structured report (JSON) to this file");
        s->add_option("--catalog", o.common.catalog, "catalog file (default: built-in)");
        commands.push_back({s, std::move(h)});
        return s;
    };

    auto* vs = sub("verify-symmetry", "check a generator against a PDE", verify_symmetry);
    vs->add_option("--pde", o.pde, "\"u_t = ...\" or case:ID")->required();
    vs->add_option("--field", o.field, "\"a*Dt + b*Dx + c*Du\"")->required();

    auto* fs = sub("find-symmetries", "polynomial-ansatz symmetry search", find_syms);
    fs->add_option("--pde", o.pde)->required();
    fs->add_option("--degree", o.degree, "ansatz degree bound")->check(CLI::Range(1, 4));
    fs->add_flag("--exponential", o.exponential, "also try exp(r t), exp(r x) coefficients");

    auto* nz = sub("normalize", "scale a coefficient of the family to +-1", normalize);
    nz->add_option("--instance", o.instance, "m=..,p=..,b0=..,b1=..,c0=..,c1=..")->required();
    nz->add_option("--coefficient", o.coefficient, "b1, c0 or c1")->required();

    auto* eq = sub("equiv", "equivalence of two family members, or drift removal", equiv);
    eq->add_option("--a", o.a)->required();
    eq->add_option("--b", o.b);
    eq->add_flag("--remove-drift", o.remove_drift_flag);

    auto algebra_opts = [&](CLI::App* s) {
        s->add_option("--algebra", o.algebra, "case:ID or label:NAME[=a]");
        s->add_option("--fields", o.fields, "\"X1; X2; ...\"");
    };
    auto* bt = sub("bracket-table", "structure constants and Jacobi check", bracket_table);
    algebra_opts(bt);
    auto* id = sub("identify", "identify a Lie algebra of dimension <= 4", identify_cmd);
    algebra_opts(id);
    auto seeded = [&](CLI::App* s) {
        s->add_option("--samples", o.samples, "audit sample directions");
        s->add_option("--seed", o.seed, "audit seed (default LIESYM_SEED or built-in)");
        s->add_option("--jobs", o.jobs, "worker threads")->check(CLI::Range(1u, 256u));
    };
    auto* os = sub("optimal-system", "optimal system of one-dimensional subalgebras", optimal_system);
    algebra_opts(os);
    seeded(os);
    auto* as = sub("audit-system", "audit a candidate optimal system", audit_system);
    algebra_opts(as);
    seeded(as);
    as->add_option("--candidates", o.candidates, "file with one subalgebra per line")->required();

    auto* rd = sub("reduce", "invariant reduction to an ODE", reduce_cmd);
    rd->add_option("--pde", o.pde)->required();
    rd->add_option("--field", o.field)->required();
    rd->add_option("--phi", o.phi, "closed-form phi(w) to lift and verify");

    auto* vsol = sub("verify-solution", "check an exact solution", verify_sol);
    vsol->add_option("--pde", o.pde)->required();
    vsol->add_option("--sol", o.sol)->required();

    auto* ts = sub("transform-solution", "map a solution by a symmetry flow or an equivalence transformation",
                   transform_sol);
    ts->add_option("--pde", o.pde, "equation of the result")->required();
    ts->add_option("--sol", o.sol)->required();
    ts->add_option("--field", o.field);
    ts->add_option("--eps", o.eps, "group parameter (default symbolic eps)");
    ts->add_option("--et", o.et, "k0=..,k1=..,k2=..,g=..,d0=..,d1=..,d2=..; sol solves the transformed equation");
    ts->add_flag("--remove-drift", o.remove_drift_flag, "use the drift-removing boost of a case:ID equation");

    auto* rg = sub("regress", "re-derive every catalog claim", regress);
    seeded(rg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_code(Outcome::Usage);
    }

    for (auto& [s, handler] : commands) {
        if (!s->parsed()) continue;
        Report r;
        r.command = s->get_name();
        auto t0 = std::chrono::steady_clock::now();
        try {
            handler(o, r);
        } catch (const Error& e) {
            Outcome out = outcome_of(e.kind());
            if (out == Outcome::Usage) {
                std::cerr << "error: " << e.what() << "\n\n" << s->help();
                return exit_code(Outcome::Usage);
            }
            r.outcome = out;
            r.verdict = to_string(e.kind());
            r.certificates["error"] = e.what();
            r.say(e.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << r.human();
        if (!o.common.out.empty()) {
            std::ofstream f(o.common.out);
            if (!f) {
                std::cerr << "error: cannot write " << o.common.out << "\n";
                return exit_code(Outcome::Usage);
            }
            f << r.document().dump(2) << "\n";
        }
        std::cerr << "time: " << secs << " s\n";
        return exit_code(r.outcome);
    }
    return exit_code(Outcome::Usage);
}
