#include "liesym/lie_algebra.hpp"

#include "liesym/algebra_catalog.hpp"
#include "liesym/error.hpp"
#include "liesym/poly.hpp"

#include <functional>
#include <random>
#include <set>

namespace liesym {

VectorField bracket(const VectorField& x, const VectorField& y) {
    return expand(VectorField{apply(x, y.xi_t) - apply(y, x.xi_t), apply(x, y.xi_x) - apply(y, x.xi_x),
                              apply(x, y.eta) - apply(y, x.eta)});
}

void LieAlgebra::set(std::size_t i, std::size_t j, const std::vector<Expr>& v) {
    for (std::size_t k = 0; k < dim; ++k) {
        C(i, j, k) = expand(v[k]);
        C(j, i, k) = expand(-v[k]);
    }
}

namespace {

const std::set<std::string> kVars = {"t", "x", "u"};

// (component, monomial in t, x, u) -> coefficient in the parameters
using Coords = std::map<std::pair<int, Expr>, Expr, std::function<bool(const std::pair<int, Expr>&,
                                                                      const std::pair<int, Expr>&)>>;

Coords make_coords() {
    return Coords([](const std::pair<int, Expr>& a, const std::pair<int, Expr>& b) {
        if (a.first != b.first) return a.first < b.first;
        return compare(a.second, b.second) < 0;
    });
}

Coords coords_of(const VectorField& v) {
    Coords out = make_coords();
    const Expr* comps[] = {&v.xi_t, &v.xi_x, &v.eta};
    for (int c = 0; c < 3; ++c) {
        for (const auto& term : terms_of(expand(*comps[c]))) {
            auto [q, rest] = split_coeff(term);
            std::vector<Expr> mono, coef = {Expr(q)};
            for (const auto& f : factors_of(rest)) (depends_on_any(f, kVars) ? mono : coef).push_back(f);
            auto key = std::make_pair(c, mul(mono));
            auto it = out.find(key);
            Expr val = mul(coef);
            if (it == out.end()) out.emplace(key, val);
            else it->second = it->second + val;
        }
    }
    for (auto& [k, v] : out) v = expand(v);
    return out;
}

bool surely_nonzero(const Expr& e) {
    if (e.is_number()) return !e.is_zero();
    return is_zero(e) == ZeroVerdict::NonZero;
}

// solves sum_k a[r][k] y_k = b[r] over expressions; nullopt if no pivot found
std::optional<std::vector<Expr>> solve_expr(std::vector<std::vector<Expr>> a, std::vector<Expr> b, std::size_t n) {
    std::size_t rows = a.size();
    std::vector<std::size_t> piv_row(n, rows);
    std::size_t r = 0;
    for (std::size_t c = 0; c < n && r < rows; ++c) {
        std::size_t best = rows;
        for (std::size_t i = r; i < rows; ++i) {
            if (a[i][c].is_number() && !a[i][c].is_zero()) {
                best = i;
                break;
            }
            if (best == rows && surely_nonzero(a[i][c])) best = i;
        }
        if (best == rows) continue;
        std::swap(a[best], a[r]);
        std::swap(b[best], b[r]);
        Expr p = a[r][c];
        for (std::size_t j = 0; j < n; ++j) a[r][j] = expand(a[r][j] / p);
        b[r] = expand(b[r] / p);
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c].is_zero()) continue;
            Expr f = a[i][c];
            for (std::size_t j = 0; j < n; ++j) a[i][j] = expand(a[i][j] - f * a[r][j]);
            b[i] = expand(b[i] - f * b[r]);
        }
        piv_row[c] = r++;
    }
    std::vector<Expr> y(n, Expr(0));
    for (std::size_t c = 0; c < n; ++c)
        if (piv_row[c] < rows) y[c] = b[piv_row[c]];
        else return std::nullopt;
    return y;
}

std::string basis_name(const std::string& prefix, std::size_t k) { return prefix + std::to_string(k + 1); }

} // namespace

LieAlgebra structure_constants(const std::vector<VectorField>& basis) {
    std::size_t n = basis.size();
    std::vector<Coords> cs;
    Coords all = make_coords();
    for (const auto& b : basis) {
        cs.push_back(coords_of(b));
        for (const auto& [k, v] : cs.back()) all.emplace(k, Expr(0));
    }
    // independence at sampled parameter values
    {
        std::set<std::string> params;
        for (const auto& c : cs)
            for (const auto& [k, v] : c)
                for (const auto& s : free_symbols(v)) params.insert(s);
        std::mt19937 rng(12345);
        std::map<std::string, Expr> sample;
        for (const auto& s : params) sample[s] = Expr(static_cast<long>(2 + rng() % 90));
        QMatrix m(all.size(), n);
        bool numeric = true;
        std::size_t i = 0;
        for (const auto& [key, unused] : all) {
            for (std::size_t j = 0; j < n; ++j) {
                auto it = cs[j].find(key);
                if (it == cs[j].end()) continue;
                Expr v = expand(substitute(it->second, sample));
                if (!v.is_number()) numeric = false;
                else m(i, j) = v.value();
            }
            ++i;
        }
        if (numeric && m.rank() < n) throw Error(ErrorKind::DependentBasis, "basis fields are linearly dependent");
    }
    LieAlgebra l(n);
    l.basis = basis;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            VectorField br = bracket(basis[i], basis[j]);
            Coords bc = coords_of(br);
            Coords keys = all;
            for (const auto& [k, v] : bc) keys.emplace(k, Expr(0));
            std::vector<std::vector<Expr>> a;
            std::vector<Expr> rhs;
            for (const auto& [key, unused] : keys) {
                std::vector<Expr> row(n, Expr(0));
                for (std::size_t k = 0; k < n; ++k) {
                    auto it = cs[k].find(key);
                    if (it != cs[k].end()) row[k] = it->second;
                }
                auto it = bc.find(key);
                a.push_back(row);
                rhs.push_back(it == bc.end() ? Expr(0) : it->second);
            }
            std::string what = "[" + basis_name("X", i) + "," + basis_name("X", j) + "] = " + render(br);
            auto y = solve_expr(a, rhs, n);
            if (!y) throw Error(ErrorKind::NotClosed, what + " is not in the span");
            VectorField comb{Expr(0), Expr(0), Expr(0)};
            for (std::size_t k = 0; k < n; ++k) comb = comb + (*y)[k] * basis[k];
            VectorField diff = expand(br - comb);
            for (const Expr* c : {&diff.xi_t, &diff.xi_x, &diff.eta})
                if (is_zero(*c) != ZeroVerdict::Zero) throw Error(ErrorKind::NotClosed, what + " is not in the span");
            l.set(i, j, *y);
        }
    return l;
}

bool check_antisymmetry(const LieAlgebra& l) {
    for (std::size_t i = 0; i < l.dim; ++i)
        for (std::size_t j = 0; j < l.dim; ++j)
            for (std::size_t k = 0; k < l.dim; ++k)
                if (is_zero(l.C(i, j, k) + l.C(j, i, k)) != ZeroVerdict::Zero) return false;
    return true;
}

bool check_jacobi(const LieAlgebra& l) {
    std::size_t n = l.dim;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                for (std::size_t q = 0; q < n; ++q) {
                    std::vector<Expr> terms;
                    for (std::size_t m = 0; m < n; ++m) {
                        terms.push_back(l.C(i, j, m) * l.C(m, k, q));
                        terms.push_back(l.C(j, k, m) * l.C(m, i, q));
                        terms.push_back(l.C(k, i, m) * l.C(m, j, q));
                    }
                    if (is_zero(add(terms)) != ZeroVerdict::Zero) return false;
                }
    return true;
}

LieAlgebra instantiate(const LieAlgebra& l, const std::map<std::string, Expr>& bindings) {
    LieAlgebra out = l;
    for (auto& v : out.c) v = expand(substitute(v, bindings));
    for (auto& b : out.basis) b = expand(substitute(b, bindings));
    return out;
}

std::string render_table(const LieAlgebra& l, const std::string& prefix) {
    std::string out;
    for (std::size_t i = 0; i < l.dim; ++i)
        for (std::size_t j = i + 1; j < l.dim; ++j) {
            std::string rhs;
            for (std::size_t k = 0; k < l.dim; ++k) {
                Expr c = expand(l.C(i, j, k));
                if (c.is_zero()) continue;
                std::string name = basis_name(prefix, k), term;
                if (c.is_one()) term = name;
                else if (c == Expr(-1)) term = "-" + name;
                else if (c.is_number()) term = render(c) + "*" + name;
                else term = "(" + render(c) + ")*" + name;
                if (rhs.empty()) rhs = term;
                else if (term[0] == '-') rhs += " - " + term.substr(1);
                else rhs += " + " + term;
            }
            if (rhs.empty()) continue;
            out += "[" + basis_name(prefix, i) + "," + basis_name(prefix, j) + "] = " + rhs + "\n";
        }
    return out;
}

std::vector<Rational> QAlgebra::bracket(const std::vector<Rational>& a, const std::vector<Rational>& b) const {
    std::vector<Rational> r(dim, Rational(0));
    for (std::size_t i = 0; i < dim; ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < dim; ++j) {
            if (b[j] == 0) continue;
            Rational f = a[i] * b[j];
            for (std::size_t k = 0; k < dim; ++k)
                if (C(i, j, k) != 0) r[k] += f * C(i, j, k);
        }
    }
    return r;
}

QMatrix QAlgebra::ad(const std::vector<Rational>& x) const {
    QMatrix m(dim, dim);
    for (std::size_t j = 0; j < dim; ++j) {
        std::vector<Rational> e(dim, Rational(0));
        e[j] = 1;
        auto v = bracket(x, e);
        for (std::size_t i = 0; i < dim; ++i) m(i, j) = v[i];
    }
    return m;
}

QAlgebra to_rational(const LieAlgebra& l) {
    QAlgebra q(l.dim);
    for (std::size_t i = 0; i < l.c.size(); ++i) {
        Expr v = expand(l.c[i]);
        if (!v.is_number()) throw Error(ErrorKind::Domain, "structure constant " + render(v) + " is not rational");
        q.c[i] = v.value();
    }
    return q;
}

LieAlgebra to_expr(const QAlgebra& q) {
    LieAlgebra l(q.dim);
    for (std::size_t i = 0; i < q.c.size(); ++i) l.c[i] = Expr(q.c[i]);
    return l;
}

QAlgebra change_basis(const QAlgebra& q, const QMatrix& w) {
    QMatrix inv = w.inverse();
    std::size_t n = q.dim;
    QAlgebra out(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            auto v = inv * q.bracket(w.col(i), w.col(j));
            for (std::size_t k = 0; k < n; ++k) out.C(i, j, k) = v[k];
        }
    return out;
}

QMatrix span(const std::vector<std::vector<Rational>>& vs, std::size_t dim) {
    if (vs.empty()) return QMatrix(dim, 0);
    QMatrix m = QMatrix::from_rows(vs);
    auto piv = m.rref();
    QMatrix out(dim, piv.size());
    for (std::size_t c = 0; c < piv.size(); ++c)
        for (std::size_t i = 0; i < dim; ++i) out(i, c) = m(c, i);
    return out;
}

QMatrix derived_algebra(const QAlgebra& q, const QMatrix& sub) {
    std::vector<std::vector<Rational>> vs;
    for (std::size_t a = 0; a < sub.cols(); ++a)
        for (std::size_t b = a + 1; b < sub.cols(); ++b) vs.push_back(q.bracket(sub.col(a), sub.col(b)));
    return span(vs, q.dim);
}

namespace {

QMatrix bracket_with_all(const QAlgebra& q, const QMatrix& sub) {
    std::vector<std::vector<Rational>> vs;
    for (std::size_t a = 0; a < sub.cols(); ++a)
        for (std::size_t j = 0; j < q.dim; ++j) {
            std::vector<Rational> e(q.dim, Rational(0));
            e[j] = 1;
            vs.push_back(q.bracket(e, sub.col(a)));
        }
    return span(vs, q.dim);
}

std::vector<Rational> unit(std::size_t n, std::size_t i) {
    std::vector<Rational> e(n, Rational(0));
    e[i] = 1;
    return e;
}

QMatrix columns(const std::vector<std::vector<Rational>>& cs) {
    QMatrix m(cs.empty() ? 0 : cs[0].size(), cs.size());
    for (std::size_t j = 0; j < cs.size(); ++j)
        for (std::size_t i = 0; i < m.rows(); ++i) m(i, j) = cs[j][i];
    return m;
}

bool in_span(const QMatrix& basis, const std::vector<Rational>& v) {
    std::vector<Rational> y;
    if (basis.cols() == 0) return is_zero_vector(v);
    return basis.solve(v, y);
}

std::vector<Rational> coords_in(const QMatrix& basis, const std::vector<Rational>& v) {
    std::vector<Rational> y;
    if (!basis.solve(v, y)) throw Error(ErrorKind::Domain, "vector not in subspace");
    return y;
}

std::vector<Rational> scale(const std::vector<Rational>& v, const Rational& s) {
    std::vector<Rational> r = v;
    for (auto& x : r) x *= s;
    return r;
}

std::vector<Rational> lin(const QMatrix& basis, const std::vector<Rational>& coef) { return basis * coef; }

// integer coefficient vectors with entries in [-b, b], nonzero, in a fixed order
std::vector<std::vector<Rational>> small_vectors(std::size_t n, long b) {
    std::vector<std::vector<Rational>> out;
    std::vector<long> c(n, -b);
    for (;;) {
        bool nz = false;
        for (auto v : c) nz = nz || v != 0;
        if (nz) {
            std::vector<Rational> r;
            for (auto v : c) r.push_back(Rational(v));
            out.push_back(r);
        }
        std::size_t i = 0;
        while (i < n && c[i] == b) c[i++] = -b;
        if (i == n) break;
        ++c[i];
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b2) {
        auto norm = [](const std::vector<Rational>& v) {
            Rational s = 0;
            for (const auto& x : v) s += abs(x);
            return s;
        };
        return norm(a) < norm(b2);
    });
    return out;
}

std::vector<Rational> eigenvector(const QMatrix& a, const Rational& lambda) {
    QMatrix m = a - QMatrix::identity(a.rows()).scaled(lambda);
    auto ns = m.nullspace();
    if (ns.empty()) throw Error(ErrorKind::Unidentified, "missing eigenvector");
    return ns[0];
}

// restriction of Y -> [Y, x] to the subspace sub (an ideal), in sub coordinates
QMatrix right_action(const QAlgebra& q, const QMatrix& sub, const std::vector<Rational>& x) {
    QMatrix r(sub.cols(), sub.cols());
    for (std::size_t j = 0; j < sub.cols(); ++j) {
        auto y = coords_in(sub, q.bracket(sub.col(j), x));
        for (std::size_t i = 0; i < sub.cols(); ++i) r(i, j) = y[i];
    }
    return r;
}

std::optional<std::vector<Rational>> complement_unit(const QMatrix& sub, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (!in_span(sub, unit(n, i))) return unit(n, i);
    return std::nullopt;
}

AlgebraLabel finish(const QAlgebra& q, std::string name, std::optional<Rational> param,
                    const std::vector<std::vector<Rational>>& basis) {
    AlgebraLabel l;
    l.name = std::move(name);
    l.param = param;
    l.witness = columns(basis);
    if (!l.witness.invertible()) throw Error(ErrorKind::Unidentified, "basis change for " + l.name + " is singular");
    if (!(change_basis(q, l.witness) == canonical_algebra(l.name, param)))
        throw Error(ErrorKind::Unidentified, "basis change for " + l.name + " does not reproduce its constants");
    return l;
}

AlgebraLabel identify2(const QAlgebra& q) {
    QMatrix d = derived_algebra(q, QMatrix::identity(2));
    if (d.cols() == 0) return finish(q, "2A1", std::nullopt, {unit(2, 0), unit(2, 1)});
    auto y = d.col(0);
    auto x = *complement_unit(d, 2);
    Rational lambda = coords_in(d, q.bracket(x, y))[0];
    return finish(q, "A2", std::nullopt, {y, scale(x, -1 / lambda)});
}

AlgebraLabel identify_sl2(const QAlgebra& q) {
    for (const auto& h : small_vectors(3, 2)) {
        QMatrix a = q.ad(h);
        auto roots = rational_roots(charpoly(a));
        if (roots.size() != 3) continue;
        Rational lam = roots.back().first;
        if (lam <= 0 || roots.front().first != -lam) continue;
        auto e2 = scale(h, 1 / lam);
        QMatrix a2 = a.scaled(1 / lam);
        auto e1 = eigenvector(a2, -1), e3 = eigenvector(a2, 1);
        auto c = q.bracket(e1, e3);
        Rational ratio = 0;
        for (std::size_t i = 0; i < 3; ++i)
            if (e2[i] != 0) {
                ratio = c[i] / e2[i];
                break;
            }
        if (ratio == 0) continue;
        e3 = scale(e3, -2 / ratio);
        return finish(q, "A3,8", std::nullopt, {e1, e2, e3});
    }
    throw Error(ErrorKind::Unidentified, "sl(2,R) type: no rational Cartan element found in the search box");
}

Rational kform(const QMatrix& k, const std::vector<Rational>& a, const std::vector<Rational>& b) {
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) s += a[i] * k(i, j) * b[j];
    return s;
}

AlgebraLabel identify_so3(const QAlgebra& q) {
    QMatrix k = killing_form(q);
    auto normalized = [&](const std::vector<Rational>& v) -> std::optional<std::vector<Rational>> {
        Rational kv = kform(k, v, v);
        if (kv >= 0) return std::nullopt;
        auto s = rational_root(Rational(-2) / kv, 2);
        if (!s) return std::nullopt;
        return scale(v, *s);
    };
    for (const auto& v : small_vectors(3, 3)) {
        auto e1 = normalized(v);
        if (!e1) continue;
        // K-orthogonal complement of e1
        QMatrix row(1, 3);
        for (std::size_t j = 0; j < 3; ++j) {
            Rational s = 0;
            for (std::size_t i = 0; i < 3; ++i) s += (*e1)[i] * k(i, j);
            row(0, j) = s;
        }
        QMatrix comp = columns(row.nullspace());
        for (const auto& c : small_vectors(2, 3)) {
            auto e2 = normalized(lin(comp, c));
            if (!e2) continue;
            return finish(q, "A3,9", std::nullopt, {*e1, *e2, q.bracket(*e1, *e2)});
        }
    }
    throw Error(ErrorKind::Unidentified, "so(3) type: no rational orthonormal basis found in the search box");
}

AlgebraLabel identify3(const QAlgebra& q) {
    QMatrix all = QMatrix::identity(3);
    QMatrix d = derived_algebra(q, all);
    switch (d.cols()) {
    case 0: return finish(q, "3A1", std::nullopt, {unit(3, 0), unit(3, 1), unit(3, 2)});
    case 1: {
        auto y = d.col(0);
        if (q.ad(y).is_zero()) {
            for (const auto& a : small_vectors(3, 1))
                for (const auto& b : small_vectors(3, 1)) {
                    auto c = q.bracket(a, b);
                    if (is_zero_vector(c)) continue;
                    if (!columns({c, a, b}).invertible()) continue;
                    return finish(q, "A3,1", std::nullopt, {c, a, b});
                }
            throw Error(ErrorKind::Unidentified, "Heisenberg type without a basis");
        }
        for (std::size_t i = 0; i < 3; ++i) {
            auto x = unit(3, i);
            auto v = q.bracket(x, y);
            if (is_zero_vector(v)) continue;
            Rational lam = coords_in(d, v)[0] / coords_in(d, y)[0];
            QMatrix z = center(q);
            if (z.cols() != 1) break;
            return finish(q, "A2+A1", std::nullopt, {y, scale(x, -1 / lam), z.col(0)});
        }
        throw Error(ErrorKind::Unidentified, "derived algebra of dimension 1 but no A2+A1 basis");
    }
    case 2: {
        if (derived_algebra(q, d).cols() != 0) throw Error(ErrorKind::Unidentified, "non-abelian derived algebra");
        auto e3p = *complement_unit(d, 3);
        QMatrix r = right_action(q, d, e3p);
        Rational tr = r(0, 0) + r(1, 1), det = r.determinant();
        Rational disc = tr * tr - 4 * det;
        if (det == 0) throw Error(ErrorKind::Unidentified, "singular action on the derived algebra");
        if (disc > 0) {
            auto s = rational_root(disc, 2);
            if (!s) throw Error(ErrorKind::Unidentified, "irrational eigenvalues on the derived algebra (A3,5 with irrational a)");
            Rational l1 = (tr + *s) / 2, l2 = (tr - *s) / 2;
            if (abs(l2) > abs(l1)) std::swap(l1, l2);
            auto v1 = lin(d, eigenvector(r, l1)), v2 = lin(d, eigenvector(r, l2));
            auto e3 = scale(e3p, 1 / l1);
            Rational a = l2 / l1;
            if (a == -1) return finish(q, "A3,4", std::nullopt, {v1, v2, e3});
            return finish(q, "A3,5^a", a, {v1, v2, e3});
        }
        if (disc == 0) {
            Rational lam = tr / 2;
            auto e3 = scale(e3p, 1 / lam);
            QMatrix n = r.scaled(1 / lam) - QMatrix::identity(2);
            if (n.is_zero()) return finish(q, "A3,3", std::nullopt, {d.col(0), d.col(1), e3});
            std::vector<Rational> w = n.col(0) == std::vector<Rational>{0, 0} ? unit(2, 1) : unit(2, 0);
            return finish(q, "A3,2", std::nullopt, {lin(d, n * w), lin(d, w), e3});
        }
        Rational alpha = tr / 2;
        auto beta = rational_root(det - alpha * alpha, 2);
        if (!beta) throw Error(ErrorKind::Unidentified, "irrational rotation rate on the derived algebra");
        Rational b = alpha / *beta;
        auto e3 = scale(e3p, 1 / *beta);
        if (b < 0) {
            b = -b;
            e3 = scale(e3, -1);
        }
        QMatrix rs = right_action(q, d, e3);
        QMatrix s = rs - QMatrix::identity(2).scaled(b);
        auto w1 = unit(2, 0);
        auto w2 = scale(s * w1, -1);
        if (b == 0) return finish(q, "A3,6", std::nullopt, {lin(d, w1), lin(d, w2), e3});
        return finish(q, "A3,7^b", b, {lin(d, w1), lin(d, w2), e3});
    }
    default: {
        auto [pos, neg] = signature(killing_form(q));
        if (neg == 3) return identify_so3(q);
        (void)pos;
        return identify_sl2(q);
    }
    }
}

std::string plus_a1(const std::string& k) {
    if (k == "3A1") return "4A1";
    if (k == "A2+A1") return "A2+2A1";
    return k + "+A1";
}

AlgebraLabel identify_2a2(const QAlgebra& q, const QMatrix& d) {
    for (const auto& x : small_vectors(4, 2)) {
        QMatrix r = right_action(q, d, x);
        Rational tr = r(0, 0) + r(1, 1), det = r.determinant();
        Rational disc = tr * tr - 4 * det;
        if (disc <= 0) continue;
        auto s = rational_root(disc, 2);
        if (!s) continue;
        auto y1 = lin(d, eigenvector(r, (tr + *s) / 2)), y2 = lin(d, eigenvector(r, (tr - *s) / 2));
        // x with [x, ya] = -ya and [x, yb] = 0
        auto solve_for = [&](const std::vector<Rational>& ya,
                             const std::vector<Rational>& yb) -> std::optional<std::vector<Rational>> {
            QMatrix m(8, 4);
            std::vector<Rational> rhs(8, Rational(0));
            for (std::size_t j = 0; j < 4; ++j) {
                auto ba = q.bracket(unit(4, j), ya), bb = q.bracket(unit(4, j), yb);
                for (std::size_t i = 0; i < 4; ++i) {
                    m(i, j) = ba[i];
                    m(4 + i, j) = bb[i];
                }
            }
            for (std::size_t i = 0; i < 4; ++i) rhs[i] = -ya[i];
            std::vector<Rational> sol;
            if (!m.solve(rhs, sol)) return std::nullopt;
            return sol;
        };
        auto x0 = solve_for(y1, y2), x1 = solve_for(y2, y1);
        if (!x0 || !x1) continue;
        QMatrix yy = columns({y1, y2});
        auto pq = coords_in(yy, q.bracket(*x0, *x1));
        // [x0 + d, x1 + d'] = [x0, x1] - gamma y1 + beta y2 with d = beta y2, d' = gamma y1
        std::vector<Rational> e2 = *x0, e4 = *x1;
        for (std::size_t i = 0; i < 4; ++i) {
            e2[i] += -pq[1] * y2[i];
            e4[i] += pq[0] * y1[i];
        }
        try {
            return finish(q, "2A2", std::nullopt, {y1, e2, y2, e4});
        } catch (const Error&) {
            continue;
        }
    }
    throw Error(ErrorKind::Unidentified, "2A2 invariants but no basis found");
}

AlgebraLabel identify4(const QAlgebra& q) {
    QMatrix all = QMatrix::identity(4);
    QMatrix d = derived_algebra(q, all);
    if (d.cols() == 0) return finish(q, "4A1", std::nullopt, {unit(4, 0), unit(4, 1), unit(4, 2), unit(4, 3)});
    QMatrix z = center(q);
    for (std::size_t c = 0; c < z.cols(); ++c) {
        auto zc = z.col(c);
        if (in_span(d, zc)) continue;
        std::vector<std::vector<Rational>> kb;
        for (std::size_t j = 0; j < d.cols(); ++j) kb.push_back(d.col(j));
        for (std::size_t i = 0; i < 4 && kb.size() < 3; ++i) {
            auto cand = kb;
            cand.push_back(unit(4, i));
            auto with_z = cand;
            with_z.push_back(zc);
            if (span(with_z, 4).cols() == with_z.size()) kb = cand;
        }
        QMatrix kmat = columns(kb);
        QAlgebra k(3);
        for (std::size_t a = 0; a < 3; ++a)
            for (std::size_t b = 0; b < 3; ++b) {
                auto v = coords_in(kmat, q.bracket(kb[a], kb[b]));
                for (std::size_t m = 0; m < 3; ++m) k.C(a, b, m) = v[m];
            }
        AlgebraLabel kl = identify3(k);
        std::vector<std::vector<Rational>> basis;
        for (std::size_t a = 0; a < 3; ++a) basis.push_back(lin(kmat, kl.witness.col(a)));
        basis.push_back(zc);
        return finish(q, plus_a1(kl.name), kl.param, basis);
    }
    if (d.cols() == 2 && z.cols() == 0 && derived_algebra(q, d).cols() == 0) return identify_2a2(q, d);
    throw Error(ErrorKind::UnsupportedClass, "4-dim algebra outside the decomposable and 2A2 classes");
}

} // namespace

QMatrix center(const QAlgebra& q) {
    std::size_t n = q.dim;
    QMatrix m(n * n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) m(j * n + k, i) = q.C(i, j, k);
    return columns(m.nullspace());
}

QMatrix killing_form(const QAlgebra& q) {
    std::size_t n = q.dim;
    std::vector<QMatrix> ads;
    for (std::size_t i = 0; i < n; ++i) ads.push_back(q.ad(unit(n, i)));
    QMatrix k(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            QMatrix p = ads[i] * ads[j];
            Rational tr = 0;
            for (std::size_t a = 0; a < n; ++a) tr += p(a, a);
            k(i, j) = tr;
        }
    return k;
}

std::pair<int, int> signature(const QMatrix& sym) {
    QMatrix a = sym;
    std::size_t n = a.rows();
    int pos = 0, neg = 0;
    std::vector<bool> done(n, false);
    for (std::size_t step = 0; step < n; ++step) {
        std::size_t p = n;
        for (std::size_t i = 0; i < n; ++i)
            if (!done[i] && a(i, i) != 0) {
                p = i;
                break;
            }
        if (p == n) {
            // make a diagonal entry nonzero by a congruence row_i += row_j
            bool fixed = false;
            for (std::size_t i = 0; i < n && !fixed; ++i)
                for (std::size_t j = 0; j < n && !fixed; ++j)
                    if (!done[i] && !done[j] && i != j && a(i, j) != 0) {
                        for (std::size_t c = 0; c < n; ++c) a(i, c) += a(j, c);
                        for (std::size_t r = 0; r < n; ++r) a(r, i) += a(r, j);
                        fixed = true;
                        p = i;
                    }
            if (!fixed) break;
        }
        Rational piv = a(p, p);
        (piv > 0 ? pos : neg)++;
        done[p] = true;
        for (std::size_t i = 0; i < n; ++i) {
            if (done[i] || a(i, p) == 0) continue;
            Rational f = a(i, p) / piv;
            for (std::size_t c = 0; c < n; ++c) a(i, c) -= f * a(p, c);
            for (std::size_t r = 0; r < n; ++r) a(r, i) -= f * a(r, p);
        }
    }
    return {pos, neg};
}

AlgebraInvariants algebra_invariants(const QAlgebra& q) {
    AlgebraInvariants inv;
    inv.dim = q.dim;
    QMatrix cur = QMatrix::identity(q.dim);
    inv.derived_series.push_back(q.dim);
    for (;;) {
        QMatrix next = derived_algebra(q, cur);
        if (next.cols() == cur.cols()) break;
        inv.derived_series.push_back(next.cols());
        cur = next;
        if (cur.cols() == 0) break;
    }
    cur = QMatrix::identity(q.dim);
    inv.lower_central.push_back(q.dim);
    for (;;) {
        QMatrix next = bracket_with_all(q, cur);
        if (next.cols() == cur.cols()) break;
        inv.lower_central.push_back(next.cols());
        cur = next;
        if (cur.cols() == 0) break;
    }
    inv.center_dim = center(q).cols();
    QMatrix k = killing_form(q);
    inv.killing_rank = k.rank();
    std::tie(inv.killing_positive, inv.killing_negative) = signature(k);
    std::size_t dd = derived_algebra(q, QMatrix::identity(q.dim)).cols();
    inv.abelian = dd == 0;
    inv.solvable = inv.derived_series.back() == 0 || q.dim == 0;
    inv.nilpotent = inv.lower_central.back() == 0 || q.dim == 0;
    return inv;
}

std::string AlgebraLabel::render() const {
    if (!param) return name;
    const CatalogAlgebra* a = find_algebra(name);
    return name + " (" + (a ? a->param : std::string("param")) + " = " + liesym::render(*param) + ")";
}

AlgebraLabel identify(const QAlgebra& q) {
    switch (q.dim) {
    case 1: return finish(q, "A1", std::nullopt, {unit(1, 0)});
    case 2: return identify2(q);
    case 3: return identify3(q);
    case 4: return identify4(q);
    default: throw Error(ErrorKind::UnsupportedClass, "identification supports dimensions 1 to 4");
    }
}

} // namespace liesym
