#include "liesym/reduction.hpp"

#include "liesym/adjoint.hpp"
#include "liesym/error.hpp"
#include "liesym/symmetry.hpp"

#include <algorithm>

namespace liesym {

namespace {

const Expr T = Expr::symbol("t");
const Expr X = Expr::symbol("x");
const Expr U = Expr::symbol("u");
const Expr W = Expr::symbol("w");

bool literal_zero(const Expr& e) { return expand(e).is_zero(); }

Expr at_origin(const Expr& e) { return expand(substitute(e, {{"t", Expr(0)}, {"x", Expr(0)}, {"u", Expr(0)}})); }

void need_free(const Expr& e, const std::string& what) {
    if (depends_on_any(e, {"t", "x", "u"}))
        throw Error(ErrorKind::UnsupportedGenerator, what + " is not affine in (t, x): " + render(e));
}

// X(s) = alpha + lambda s, X(y) = beta0 + beta1 s + k y
struct Coords {
    Expr l1, l2;          // s = l1 t + l2 x
    bool y_is_x = true;   // the complementary coordinate
    Expr alpha, lambda, beta0, beta1, k;
};

// called with b1 != 0
std::optional<std::pair<Rational, Rational>> left_eigenvector(const AffineGenerator& g) {
    // l^T A = lambda l^T with A = [[a1, a2], [b1, b2]]
    for (const Expr* e : {&g.a1, &g.a2, &g.b1, &g.b2})
        if (!expand(*e).is_number()) return std::nullopt;
    Rational a1 = expand(g.a1).value(), a2 = expand(g.a2).value(), b1 = expand(g.b1).value(), b2 = expand(g.b2).value();
    Rational tr = a1 + b2, det = a1 * b2 - a2 * b1;
    Rational disc = tr * tr - 4 * det;
    if (disc < 0) return std::nullopt;
    auto root = rational_root(disc, 2);
    if (!root) return std::nullopt;
    Rational lam = (tr + *root) / 2;
    return std::make_pair(Rational(1), (lam - a1) / b1);
}

Coords coordinates(const AffineGenerator& g) {
    Coords c;
    if (literal_zero(g.a2)) {
        c.l1 = 1;
        c.l2 = 0;
    } else if (literal_zero(g.b1)) {
        c.l1 = 0;
        c.l2 = 1;
    } else if (auto l = left_eigenvector(g)) {
        c.l1 = l->first;
        c.l2 = l->second;
    } else {
        throw Error(ErrorKind::UnsupportedGenerator, "the affine part has no rational real eigenvector");
    }
    c.y_is_x = !literal_zero(c.l1);
    Expr s = Expr::symbol("_s"), y = Expr::symbol("_y");
    Expr xi_t = g.a0 + g.a1 * T + g.a2 * X, xi_x = g.b0 + g.b1 * T + g.b2 * X;
    // (t, x) in terms of (s, y)
    std::map<std::string, Expr> back;
    if (c.y_is_x) back = {{"x", y}, {"t", (s - c.l2 * y) / c.l1}};
    else back = {{"t", y}, {"x", (s - c.l1 * y) / c.l2}};
    Expr xs = expand(substitute(c.l1 * xi_t + c.l2 * xi_x, back));
    Expr xy = expand(substitute(c.y_is_x ? xi_x : xi_t, back));
    c.lambda = expand(differentiate(xs, "_s"));
    if (depends_on_any(c.lambda, {"_s", "_y"}) || !literal_zero(differentiate(xs, "_y")))
        throw Error(ErrorKind::UnsupportedGenerator, "characteristic system does not decouple");
    c.alpha = expand(substitute(xs, {{"_s", Expr(0)}}));
    c.k = expand(differentiate(xy, "_y"));
    c.beta1 = expand(differentiate(xy, "_s"));
    c.beta0 = expand(substitute(xy, {{"_s", Expr(0)}, {"_y", Expr(0)}}));
    return c;
}

Expr div(const Expr& a, const Expr& b, std::vector<Expr>& assumptions) {
    Expr e = expand(b);
    if (!e.is_number()) assumptions.push_back(e);
    return expand(a * pow(e, Expr(-1)));
}

std::string transverse_name(const Coords& c, bool degenerate) {
    if (degenerate) return c.y_is_x ? "x" : "t";
    if (literal_zero(c.l2) && expand(c.l1).is_one()) return "t";
    if (literal_zero(c.l1) && expand(c.l2).is_one()) return "x";
    return "s";
}

} // namespace

AffineGenerator affine_generator(const VectorField& v, bool allow_degenerate) {
    AffineGenerator g;
    auto split = [&](const Expr& e, Expr& c0, Expr& ct, Expr& cx, const std::string& what) {
        Expr f = expand(e);
        if (depends_on(f, "u")) throw Error(ErrorKind::UnsupportedGenerator, what + " depends on u");
        ct = expand(differentiate(f, "t"));
        cx = expand(differentiate(f, "x"));
        need_free(ct, what);
        need_free(cx, what);
        c0 = at_origin(f);
        if (!literal_zero(f - c0 - ct * T - cx * X)) throw Error(ErrorKind::UnsupportedGenerator, what + " is not affine");
    };
    split(v.xi_t, g.a0, g.a1, g.a2, "xi_t");
    split(v.xi_x, g.b0, g.b1, g.b2, "xi_x");
    Expr eta = expand(v.eta);
    g.c = expand(differentiate(eta, "u"));
    need_free(g.c, "eta/u");
    if (!literal_zero(eta - g.c * U)) throw Error(ErrorKind::UnsupportedGenerator, "eta is not of the form c*u: " + render(eta));
    if (!allow_degenerate && literal_zero(v.xi_t) && literal_zero(v.xi_x))
        throw Error(ErrorKind::DegenerateGenerator, "xi_t = xi_x = 0 gives no invariant of (t, x)");
    return g;
}

Expr phi(int order) { return func("phi", order, W); }

GeneratorInvariants generator_invariants(const VectorField& v) {
    AffineGenerator g = affine_generator(v);
    Coords c = coordinates(g);
    GeneratorInvariants out;
    auto& as = out.assumptions;
    Expr s = Expr::symbol("_s"), y = Expr::symbol("_y");
    bool degenerate = literal_zero(c.alpha) && literal_zero(c.lambda);
    Expr omega, mult, y_of;  // y_of: y in terms of (_s or _tau, w)
    Expr shift_of(0);        // tau = s + shift for scalings
    if (degenerate) {
        omega = s;
        Expr gamma = expand(c.beta0 + c.beta1 * s);
        if (!literal_zero(c.k)) mult = pow(y + div(gamma, c.k, as), div(g.c, c.k, as));
        else if (literal_zero(g.c)) mult = Expr(1);
        else mult = exp(div(g.c * y, gamma, as));
    } else if (literal_zero(c.lambda)) {
        Expr r = div(c.k, c.alpha, as);
        if (literal_zero(r)) {
            Expr yp = div(c.beta0 * s + c.beta1 * s * s / Expr(2), c.alpha, as);
            omega = y - yp;
            y_of = yp + W;
        } else {
            Expr q = expand(-div(c.beta1, c.k, as));
            Expr p = div(q - div(c.beta0, c.alpha, as), r, as);
            Expr yp = p + q * s;
            omega = (y - yp) * exp(-r * s);
            y_of = yp + W * exp(r * s);
        }
        mult = literal_zero(g.c) ? Expr(1) : exp(div(g.c * s, c.alpha, as));
    } else {
        shift_of = div(c.alpha, c.lambda, as);
        Expr tau = expand(s + shift_of);
        Expr tau_c = Expr::symbol("_tau");
        Expr kk = div(c.k, c.lambda, as), b1 = div(c.beta1, c.lambda, as);
        Expr b0 = div(c.beta0 - c.beta1 * div(c.alpha, c.lambda, as), c.lambda, as);
        Expr yp(0);
        if (!literal_zero(b0)) yp += literal_zero(kk) ? b0 * log(tau) : -div(b0, kk, as);
        if (!literal_zero(b1)) yp += literal_zero(kk - Expr(1)) ? b1 * tau * log(tau) : div(b1 * tau, Expr(1) - kk, as);
        omega = (y - yp) * pow(tau, -kk);
        y_of = substitute(yp, {{"_s", tau_c - shift_of}}) + W * pow(tau_c, kk);
        mult = literal_zero(g.c) ? Expr(1) : pow(tau, div(g.c, c.lambda, as));
    }
    // back to (t, x)
    Expr sv = c.l1 * T + c.l2 * X, yv = c.y_is_x ? X : T;
    std::map<std::string, Expr> fwd = {{"_s", sv}, {"_y", yv}};
    out.omega = expand(substitute(omega, fwd));
    out.multiplier = expand(substitute(mult, fwd));
    // chart: (transverse, w) -> (t, x); a shifted scaling variable becomes the
    // transverse symbol itself so that powers of it stay canonical
    Expr shift = shift_of;
    out.transverse = literal_zero(shift) ? transverse_name(c, degenerate) : "s";
    Expr sig = Expr::symbol(out.transverse);
    Expr s_c, y_c;
    if (degenerate) {
        s_c = W;
        y_c = sig;
    } else {
        s_c = expand(sig - shift);
        y_c = substitute(y_of, {{"_tau", sig}, {"_s", s_c}});
    }
    if (c.y_is_x) {
        out.x_of = expand(y_c);
        out.t_of = expand((s_c - c.l2 * y_c) * pow(c.l1, Expr(-1)));
    } else {
        out.t_of = expand(y_c);
        out.x_of = expand((s_c - c.l1 * y_c) * pow(c.l2, Expr(-1)));
    }
    auto vanishes = [&](const Expr& e) {
        Expr f = expand(e);
        return f.is_zero() || expand(substitute(f, {{"t", out.t_of}, {"x", out.x_of}})).is_zero();
    };
    if (!vanishes(apply(v, out.omega)))
        throw Error(ErrorKind::ReductionFailure, "X(omega) = " + render(expand(apply(v, out.omega))) + " is not zero");
    if (!vanishes(apply(v, out.multiplier) - g.c * out.multiplier))
        throw Error(ErrorKind::ReductionFailure, "X(M) - c M does not vanish for M = " + render(out.multiplier));
    if (!vanishes(substitute(out.omega, {{"t", out.t_of}, {"x", out.x_of}}) - W))
        throw Error(ErrorKind::ReductionFailure, "chart does not invert omega");
    return out;
}

// ---------------------------------------------------------------- reduce

namespace {

int phi_order(const Expr& term) {
    int k = -1;
    for (const auto& f : factors_of(term)) {
        Expr b = split_pow(f).first;
        if (b.is_func("phi")) k = std::max(k, b.order());
    }
    return k;
}

// factors of a term that depend on the transverse variable only
Expr transverse_part(const Expr& term, const std::string& sig) {
    std::vector<Expr> fs;
    for (const auto& f : factors_of(term))
        if (depends_on(f, sig) && !depends_on(f, "w")) fs.push_back(f);
    return mul(fs);
}

} // namespace

ReductionAnsatz reduce_pde(const EvolutionPDE& pde, const VectorField& v) {
    auto sv = is_symmetry(pde, v);
    if (sv.verdict != SymmetryStatus::Symmetry)
        throw Error(ErrorKind::NotASymmetry, "field is not a symmetry; residual " + render(sv.residual));
    ReductionAnsatz r;
    r.generator = v;
    r.invariants = generator_invariants(v);
    const Expr& om = r.invariants.omega;
    const Expr& m = r.invariants.multiplier;
    // u = M phi(omega) with the chain rule written out on placeholders
    Expr ot = differentiate(om, "t"), ox = differentiate(om, "x"), oxx = differentiate(ox, "x");
    Expr mt = differentiate(m, "t"), mx = differentiate(m, "x"), mxx = differentiate(mx, "x");
    Expr u = m * phi(0);
    Expr ut = mt * phi(0) + m * ot * phi(1);
    Expr ux = mx * phi(0) + m * ox * phi(1);
    Expr uxx = mxx * phi(0) + Expr(2) * mx * ox * phi(1) + m * oxx * phi(1) + m * ox * ox * phi(2);
    Expr res = ut - substitute(pde.rhs, {{"u", u}, {jet_name(0, 1), ux}, {jet_name(0, 2), uxx}});
    res = expand(substitute(res, {{"t", r.invariants.t_of}, {"x", r.invariants.x_of}}));
    r.residual = res;
    const std::string& sig = r.invariants.transverse;
    auto terms = terms_of(res);
    if (res.is_zero()) throw Error(ErrorKind::ReductionFailure, "ansatz makes the equation vanish identically");
    Expr f = transverse_part(terms.front(), sig);
    Expr ode = expand(res * pow(f, Expr(-1)));
    if (depends_on(ode, sig))
        throw Error(ErrorKind::ReductionFailure, "residual does not collapse to an ODE in w: " + render(res));
    // leading term: highest phi derivative, first in canonical order
    auto ts = terms_of(ode);
    int best = -1;
    Rational lead = 1;
    for (const auto& t : ts) {
        int k = phi_order(t);
        if (k > best) {
            best = k;
            lead = split_coeff(t).first;
        }
    }
    r.ode = expand(ode * Expr(1 / lead));
    r.factor = expand(f * Expr(lead));
    r.certificate = literal_zero(res - r.factor * r.ode);
    if (!r.certificate) throw Error(ErrorKind::ReductionFailure, "factorization identity fails for " + render(res));
    return r;
}

Expr lift_solution(const ReductionAnsatz& r, const Expr& phi_of_w) {
    return expand(r.invariants.multiplier * substitute(phi_of_w, {{"w", r.invariants.omega}}));
}

const char* to_string(SolutionStatus s) {
    switch (s) {
    case SolutionStatus::Solution: return "Solution";
    case SolutionStatus::NotSolution: return "NotSolution";
    case SolutionStatus::Undecided: return "Undecided";
    }
    return "?";
}

SolutionVerdict verify_solution(const EvolutionPDE& pde, const Expr& u) {
    SolutionVerdict out;
    Expr ux = differentiate(u, "x");
    Expr rhs = substitute(pde.rhs, {{"u", u}, {jet_name(0, 1), ux}, {jet_name(0, 2), differentiate(ux, "x")}});
    out.residual = expand(differentiate(u, "t") - rhs);
    if (out.residual.is_zero()) {
        out.verdict = SolutionStatus::Solution;
    } else {
        ZeroVerdict z = is_zero(out.residual);
        out.verdict = z == ZeroVerdict::NonZero ? SolutionStatus::NotSolution : SolutionStatus::Undecided;
    }
    return out;
}

// ---------------------------------------------------------------- flows

Flow flow(const VectorField& v, const Expr& eps) {
    AffineGenerator g = affine_generator(v, true);
    ExprMatrix a = {{g.a1, g.a2, g.a0}, {g.b1, g.b2, g.b0}, {Expr(0), Expr(0), Expr(0)}};
    std::optional<ExprMatrix> e;
    bool numeric = true;
    QMatrix q(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            Expr x = expand(a[i][j]);
            if (!x.is_number()) numeric = false;
            else q(i, j) = x.value();
        }
    if (numeric) {
        e = closed_form_exp(q, eps);
        if (!e) throw Error(ErrorKind::UnsupportedGenerator, "flow has no closed form (irrational or complex spectrum)");
    } else {
        ExprMatrix a3 = multiply(multiply(a, a), a);
        for (const auto& row : a3)
            for (const auto& x : row)
                if (!literal_zero(x))
                    throw Error(ErrorKind::UnsupportedGenerator, "symbolic coefficients need a nilpotent linear part");
        ExprMatrix a2 = multiply(a, a);
        e = ExprMatrix(3, std::vector<Expr>(3));
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j)
                (*e)[i][j] = expand(Expr(i == j ? 1 : 0) + eps * a[i][j] + eps * eps * a2[i][j] / Expr(2));
    }
    const auto& m = *e;
    Flow f;
    f.t = expand(m[0][0] * T + m[0][1] * X + m[0][2]);
    f.x = expand(m[1][0] * T + m[1][1] * X + m[1][2]);
    f.u = expand(exp(g.c * eps) * U);
    return f;
}

Expr transform_solution(const Expr& sol, const VectorField& v, const Expr& eps) {
    Flow back = flow(v, -eps);
    AffineGenerator g = affine_generator(v, true);
    return expand(exp(g.c * eps) * substitute(sol, {{"t", back.t}, {"x", back.x}}));
}

Expr transform_solution(const Expr& sol, const ET& g) {
    check_invertible(g);
    Expr ts = g.k0 * T + g.d0, xs = g.k1 * X + g.g * T + g.d1;
    return expand((substitute(sol, {{"t", ts}, {"x", xs}}) - g.d2) * pow(g.k2, Expr(-1)));
}

} // namespace liesym
