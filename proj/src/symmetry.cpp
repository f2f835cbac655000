#include "liesym/symmetry.hpp"

#include "liesym/error.hpp"
#include "liesym/linalg.hpp"
#include "liesym/poly.hpp"

#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <set>

namespace liesym {

const char* to_string(SymmetryStatus s) {
    switch (s) {
    case SymmetryStatus::Symmetry: return "Symmetry";
    case SymmetryStatus::NotSymmetry: return "NotSymmetry";
    case SymmetryStatus::Undecided: return "Undecided";
    }
    return "?";
}

Expr invariance_residual(const EvolutionPDE& pde, const VectorField& x) {
    const Expr& f = pde.rhs;
    ProlongedField pr = prolong2(x);
    Expr lhs = pr.eta_t - (x.xi_t * differentiate(f, "t") + x.xi_x * differentiate(f, "x") +
                           x.eta * differentiate(f, "u") + pr.eta_x * differentiate(f, "u_x") +
                           pr.eta_xx * differentiate(f, "u_xx"));
    Expr fx = total_derivative(f, 'x', 3);
    return expand(substitute(expand(lhs), {{"u_tx", fx}, {"u_t", f}}));
}

SymmetryVerdict is_symmetry(const EvolutionPDE& pde, const VectorField& x) {
    SymmetryVerdict v;
    v.residual = invariance_residual(pde, x);
    if (v.residual.is_zero()) {
        v.verdict = SymmetryStatus::Symmetry;
        return v;
    }
    switch (is_zero(v.residual)) {
    case ZeroVerdict::Zero:
        v.verdict = SymmetryStatus::Symmetry;
        v.residual = Expr(0);
        break;
    case ZeroVerdict::NonZero: v.verdict = SymmetryStatus::NotSymmetry; break;
    case ZeroVerdict::Undecided: v.verdict = SymmetryStatus::Undecided; break;
    }
    return v;
}

namespace {

const std::string kLam = "_lam";
// rates num/den with |num|, den up to this bound are screened
constexpr long kRateBound = 64;

void check_ansatz_class(const Expr& rhs) {
    static const std::set<std::string> allowed = {"t", "x", "u", "u_x", "u_xx"};
    for (const auto& s : free_symbols(rhs))
        if (!allowed.count(s))
            throw Error(ErrorKind::UnsupportedCoefficients, "rhs contains '" + s + "'; fix parameters to rationals");
    for (const auto& term : terms_of(rhs)) {
        for (const auto& f : factors_of(split_coeff(term).second)) {
            auto [b, e] = split_pow(f);
            if (b.is_number()) continue;
            if (!b.is_symbol() || !e.is_number())
                throw Error(ErrorKind::UnsupportedCoefficients, "rhs term " + render(term) + " is not a power monomial");
            if ((b.name() == "t" || b.name() == "x") && (!is_integer(e.value()) || e.value() < 0))
                throw Error(ErrorKind::UnsupportedCoefficients, "rhs is not polynomial in " + b.name());
        }
    }
}

struct Ansatz {
    std::vector<std::pair<int, int>> monos;  // t^i x^j
    std::size_t per = 0;
    std::size_t size() const { return 4 * per; }
    static std::string unknown(std::size_t k) { return "_k" + std::to_string(k); }

    explicit Ansatz(int degree) {
        for (int d = 0; d <= degree; ++d)
            for (int i = d; i >= 0; --i) monos.push_back({i, d - i});
        per = monos.size();
    }

    Expr mono(std::size_t n) const {
        return pow(Expr::symbol("t"), Expr(static_cast<long>(monos[n].first))) *
               pow(Expr::symbol("x"), Expr(static_cast<long>(monos[n].second)));
    }

    // block 0: xi_t, 1: xi_x, 2: alpha (coefficient of u), 3: beta
    template <class Coef>
    VectorField field(Coef coef, const Expr& factor) const {
        Expr c[4];
        for (int b = 0; b < 4; ++b) {
            std::vector<Expr> ts;
            for (std::size_t n = 0; n < per; ++n) {
                Expr k = coef(b * per + n);
                if (!k.is_zero()) ts.push_back(k * mono(n));
            }
            c[b] = add(ts);
        }
        return expand(VectorField{factor * c[0], factor * c[1], factor * (c[2] * Expr::symbol("u") + c[3])});
    }
};

// linear system of the residual: one row per independent monomial, entries
// polynomial in the rate symbol
struct System {
    std::map<Expr, std::map<std::size_t, QPoly>, ExprLess> rows;
    std::size_t cols = 0;

    QMatrix at(const Rational& z) const {
        QMatrix m(rows.size(), cols);
        std::size_t i = 0;
        for (const auto& [key, row] : rows) {
            for (const auto& [c, p] : row) m(i, c) = p(z);
            ++i;
        }
        return m;
    }
    int max_degree() const {
        int d = 0;
        for (const auto& [k, row] : rows)
            for (const auto& [c, p] : row) d = std::max(d, p.degree());
        return d;
    }
};

System collect(const Expr& residual, std::size_t cols) {
    System sys;
    sys.cols = cols;
    for (const auto& term : terms_of(residual)) {
        auto [coef, rest] = split_coeff(term);
        long col = -1;
        std::size_t lam_deg = 0;
        std::vector<Expr> key;
        for (const auto& f : factors_of(rest)) {
            auto [b, e] = split_pow(f);
            if (b.is_symbol() && b.name().rfind("_k", 0) == 0) {
                if (col >= 0 || !e.is_one()) throw Error(ErrorKind::Domain, "residual is not linear in the ansatz");
                col = std::stol(b.name().substr(2));
            } else if (b.is_symbol() && b.name() == kLam) {
                lam_deg = static_cast<std::size_t>(e.value().get_num().get_si());
            } else if (depends_on(f, kLam)) {
                // the common exp(rate * var) factor
            } else {
                key.push_back(f);
            }
        }
        if (col < 0) throw Error(ErrorKind::Domain, "residual term without ansatz unknown: " + render(term));
        auto& cell = sys.rows[mul(key)][static_cast<std::size_t>(col)];
        cell = cell + QPoly::monomial(coef, lam_deg);
    }
    return sys;
}

void split_basis(const Ansatz& az, std::vector<std::vector<Rational>> basis, const Expr& factor, const EvolutionPDE& pde,
                 FindResult& out) {
    if (basis.empty()) return;
    QMatrix b = QMatrix::from_rows(basis);
    auto piv = b.rref();
    for (std::size_t i = 0; i < piv.size(); ++i) {
        auto row = b.row(i);
        VectorField v = az.field([&](std::size_t k) { return Expr(row[k]); }, factor);
        auto verdict = is_symmetry(pde, v);
        if (verdict.verdict != SymmetryStatus::Symmetry)
            throw Error(ErrorKind::NotASymmetry, "solution field failed re-verification: " + render(v));
        if (piv[i] >= 3 * az.per) out.superposition.push_back(v);
        else out.generators.push_back(v);
    }
}

// Rate screening runs modulo a 61-bit prime; exact confirmation follows.
using u64 = std::uint64_t;
constexpr u64 kPrime = 2305843009213693951ULL;

u64 mulmod(u64 a, u64 b) { return static_cast<u64>(static_cast<unsigned __int128>(a) * b % kPrime); }
u64 addmod(u64 a, u64 b) { return (a + b) % kPrime; }
u64 submod(u64 a, u64 b) { return (a + kPrime - b) % kPrime; }
u64 powmod(u64 a, u64 e) {
    u64 r = 1;
    for (; e; e >>= 1, a = mulmod(a, a))
        if (e & 1) r = mulmod(r, a);
    return r;
}
u64 invmod(u64 a) { return powmod(a, kPrime - 2); }
u64 to_mod(const Integer& z) {
    Integer pm;
    mpz_set_ui(pm.get_mpz_t(), static_cast<unsigned long>(kPrime));
    Integer r = z % pm;
    if (r < 0) r += pm;
    return mpz_get_ui(r.get_mpz_t());
}
u64 to_mod(const Rational& q) { return mulmod(to_mod(Integer(q.get_num())), invmod(to_mod(Integer(q.get_den())))); }
u64 signed_mod(long v) { return v >= 0 ? static_cast<u64>(v) % kPrime : kPrime - static_cast<u64>(-v) % kPrime; }

u64 det_mod(std::vector<u64> a, std::size_t n) {
    u64 det = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = n;
        for (std::size_t i = c; i < n; ++i)
            if (a[i * n + c]) {
                piv = i;
                break;
            }
        if (piv == n) return 0;
        if (piv != c) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a[piv * n + j], a[c * n + j]);
            det = kPrime - det;
        }
        det = mulmod(det, a[c * n + c]);
        u64 inv = invmod(a[c * n + c]);
        for (std::size_t i = c + 1; i < n; ++i) {
            u64 f = mulmod(a[i * n + c], inv);
            if (!f) continue;
            for (std::size_t j = c; j < n; ++j) a[i * n + j] = submod(a[i * n + j], mulmod(f, a[c * n + j]));
        }
    }
    return det % kPrime;
}

// Newton form of the interpolant of det(P M(z)) mod p
struct ModPoly {
    std::vector<u64> xs, dd;
    u64 operator()(u64 z) const {
        u64 r = 0;
        for (std::size_t i = dd.size(); i-- > 0;) r = addmod(mulmod(r, submod(z, xs[i])), dd[i]);
        return r;
    }
    bool is_zero() const {
        for (auto v : dd)
            if (v) return false;
        return true;
    }
};

ModPoly projected_det(const System& sys, std::mt19937& rng) {
    std::size_t n = sys.cols, r = sys.rows.size();
    std::vector<u64> proj(n * r);
    for (auto& v : proj) v = signed_mod(static_cast<long>(rng() % 7) - 3);
    // entries of M as polynomials mod p
    std::vector<std::vector<u64>> cells(r * n);
    std::size_t i = 0;
    for (const auto& [key, row] : sys.rows) {
        for (const auto& [c, poly] : row) {
            std::vector<u64> m;
            for (const auto& q : poly.coeffs()) m.push_back(to_mod(q));
            cells[i * n + c] = m;
        }
        ++i;
    }
    std::size_t deg = n * static_cast<std::size_t>(std::max(sys.max_degree(), 1));
    ModPoly out;
    std::vector<u64> ys;
    for (std::size_t k = 0; k <= deg; ++k) {
        u64 z = signed_mod(static_cast<long>(k) - static_cast<long>(deg / 2));
        std::vector<u64> mz(r * n, 0);
        for (std::size_t a = 0; a < r * n; ++a) {
            u64 v = 0;
            for (std::size_t d = cells[a].size(); d-- > 0;) v = addmod(mulmod(v, z), cells[a][d]);
            mz[a] = v;
        }
        std::vector<u64> sq(n * n, 0);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < r; ++b) {
                u64 pv = proj[a * r + b];
                if (!pv) continue;
                for (std::size_t c = 0; c < n; ++c)
                    if (mz[b * n + c]) sq[a * n + c] = addmod(sq[a * n + c], mulmod(pv, mz[b * n + c]));
            }
        out.xs.push_back(z);
        ys.push_back(det_mod(sq, n));
    }
    out.dd = ys;
    std::size_t m = ys.size();
    for (std::size_t j = 1; j < m; ++j)
        for (std::size_t a = m - 1; a >= j; --a) {
            out.dd[a] = mulmod(submod(out.dd[a], out.dd[a - 1]), invmod(submod(out.xs[a], out.xs[a - j])));
            if (a == j) break;
        }
    return out;
}

void search_rates(const EvolutionPDE& pde, const Ansatz& az, char dir, FindResult& out) {
    Expr lam = Expr::symbol(kLam);
    Expr factor = exp(lam * Expr::symbol(std::string(1, dir)));
    VectorField x = az.field([](std::size_t k) { return Expr::symbol(Ansatz::unknown(k)); }, factor);
    System sys = collect(invariance_residual(pde, x), az.size());
    if (sys.rows.size() < sys.cols) return;  // every rate admits solutions; not a discrete spectrum
    std::mt19937 rng(dir == 't' ? 17 : 29);
    ModPoly d1 = projected_det(sys, rng), d2 = projected_det(sys, rng);
    if (d1.is_zero() && d2.is_zero()) return;
    for (long den = 1; den <= kRateBound; ++den)
        for (long num = -kRateBound; num <= kRateBound; ++num) {
            if (num == 0 || std::gcd(num, den) != 1) continue;
            u64 z = mulmod(signed_mod(num), invmod(signed_mod(den)));
            if (d1(z) || d2(z)) continue;
            Rational r(num, den);
            r.canonicalize();
            auto basis = sys.at(r).nullspace();
            if (basis.empty()) continue;
            std::size_t before = out.generators.size() + out.superposition.size();
            split_basis(az, basis, exp(Expr(r) * Expr::symbol(std::string(1, dir))), pde, out);
            if (out.generators.size() + out.superposition.size() > before)
                (dir == 't' ? out.t_rates : out.x_rates).push_back(r);
        }
}

} // namespace

FindResult find_symmetries(const EvolutionPDE& pde, const FindOptions& opts) {
    if (opts.degree < 1) throw Error(ErrorKind::Domain, "ansatz degree must be at least 1");
    check_ansatz_class(pde.rhs);
    Ansatz az(opts.degree);
    FindResult out;
    VectorField x = az.field([](std::size_t k) { return Expr::symbol(Ansatz::unknown(k)); }, Expr(1));
    System sys = collect(invariance_residual(pde, x), az.size());
    out.unknowns = az.size();
    out.equations = sys.rows.size();
    split_basis(az, sys.at(0).nullspace(), Expr(1), pde, out);
    if (opts.exponential) {
        search_rates(pde, az, 't', out);
        search_rates(pde, az, 'x', out);
    }
    return out;
}

std::vector<ExponentBranch> exponent_branches(const EvolutionPDE& pde) {
    std::set<Expr, ExprLess> exps;
    for (const auto& term : terms_of(expand(pde.rhs))) {
        Expr e = Expr(0);
        for (const auto& f : factors_of(split_coeff(term).second)) {
            auto [b, k] = split_pow(f);
            if (b.is_symbol() && b.name() == "u") e = e + k;
        }
        exps.insert(expand(e));
    }
    static const std::set<std::string> vars = {"t", "x", "u", "u_x", "u_xx"};
    std::vector<ExponentBranch> out;
    std::set<std::pair<std::string, std::string>> seen;
    std::vector<Expr> list(exps.begin(), exps.end());
    for (std::size_t i = 0; i < list.size(); ++i)
        for (std::size_t j = i + 1; j < list.size(); ++j)
            for (long k = -2; k <= 2; ++k) {
                Expr cond = expand(list[i] - list[j] - Expr(k));
                auto syms = free_symbols(cond);
                for (const auto& v : vars) syms.erase(v);
                if (syms.empty()) continue;
                std::vector<std::string> order(syms.begin(), syms.end());
                if (syms.count("m")) order.insert(order.begin(), "m");
                if (syms.count("p")) order.insert(order.begin(), "p");
                for (const auto& s : order) {
                    Expr a = expand(differentiate(cond, s));
                    if (!a.is_number() || a.is_zero()) continue;
                    Expr value = expand(Expr::symbol(s) - cond / a);
                    if (seen.insert({s, render(value)}).second) {
                        std::string rhs = render(list[j]);
                        if (k) rhs += (k > 0 ? " + " : " - ") + std::to_string(k > 0 ? k : -k);
                        out.push_back({s, value, render(list[i]) + " = " + rhs});
                    }
                    break;
                }
            }
    return out;
}

} // namespace liesym
