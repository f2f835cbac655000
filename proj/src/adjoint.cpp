#include "liesym/adjoint.hpp"

#include "liesym/error.hpp"
#include "liesym/poly.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace liesym {

namespace {

Rational falling(long i, long k) {
    Rational r = 1;
    for (long j = 0; j < k; ++j) r *= i - j;
    return r;
}

std::optional<std::vector<std::pair<Rational, int>>> rational_spectrum(const QMatrix& a) {
    try {
        auto roots = rational_roots(charpoly(a));
        std::size_t total = 0;
        for (const auto& [r, m] : roots) total += static_cast<std::size_t>(m);
        if (total != a.rows()) return std::nullopt;
        return roots;
    } catch (const Error&) {
        return std::nullopt;
    }
}

ExprMatrix closed_form_exp(const QMatrix& a, const Expr& eps, const std::vector<std::pair<Rational, int>>& spec) {
    std::size_t n = a.rows();
    // r(z) = sum c_i z^i with r^(k)(lam) = eps^k exp(lam eps) for k below the multiplicity
    QMatrix m(n, n);
    std::vector<Expr> rhs;
    std::size_t row = 0;
    for (const auto& [lam, mult] : spec)
        for (int k = 0; k < mult; ++k, ++row) {
            for (std::size_t i = static_cast<std::size_t>(k); i < n; ++i)
                m(row, i) = falling(static_cast<long>(i), k) * rational_pow(lam, static_cast<long>(i) - k);
            rhs.push_back(pow(eps, Expr(k)) * exp(Expr(lam) * eps));
        }
    QMatrix minv = m.inverse();
    std::vector<Expr> c(n, Expr(0));
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<Expr> terms;
        for (std::size_t r = 0; r < n; ++r)
            if (minv(i, r) != 0) terms.push_back(Expr(minv(i, r)) * rhs[r]);
        c[i] = add(terms);
    }
    ExprMatrix out(n, std::vector<Expr>(n, Expr(0)));
    QMatrix power = QMatrix::identity(n);
    std::vector<std::vector<std::vector<Expr>>> acc(n, std::vector<std::vector<Expr>>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t s = 0; s < n; ++s)
                if (power(r, s) != 0) acc[r][s].push_back(Expr(power(r, s)) * c[i]);
        power = power * a;
    }
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s < n; ++s) out[r][s] = expand(add(acc[r][s]));
    return out;
}

} // namespace

std::optional<ExprMatrix> closed_form_exp(const QMatrix& a, const Expr& eps) {
    auto spec = rational_spectrum(a);
    if (!spec) return std::nullopt;
    return closed_form_exp(a, eps, *spec);
}

bool is_nilpotent(const QMatrix& a) {
    QMatrix p = a;
    for (std::size_t i = 1; i < a.rows(); ++i) p = p * a;
    return p.is_zero();
}

QMatrix exp_nilpotent(const QMatrix& a, const Rational& t) {
    if (!is_nilpotent(a)) throw Error(ErrorKind::Domain, "matrix is not nilpotent");
    std::size_t n = a.rows();
    QMatrix out = QMatrix::identity(n), term = QMatrix::identity(n);
    for (std::size_t k = 1; k < n; ++k) {
        term = (term * a).scaled(t / static_cast<long>(k));
        out = out + term;
    }
    return out;
}

Eigen::MatrixXd to_eigen(const QMatrix& a) {
    Eigen::MatrixXd m(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j).get_d();
    return m;
}

Eigen::VectorXd to_eigen(const std::vector<Rational>& v) {
    Eigen::VectorXd r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r(i) = v[i].get_d();
    return r;
}

Eigen::MatrixXd expm(const Eigen::MatrixXd& a) { return a.exp(); }

AdjointMatrix adjoint_matrix(const QAlgebra& q, const std::vector<Rational>& x, const Expr& eps) {
    QMatrix a = q.ad(x);
    AdjointMatrix out;
    if (auto spec = rational_spectrum(a)) {
        out.closed_form = true;
        out.exact = closed_form_exp(a, eps, *spec);
    }
    Expr e = expand(eps);
    if (e.is_number()) {
        out.numeric = expm(to_eigen(a) * e.value().get_d());
        if (out.closed_form && is_nilpotent(a)) {
            QMatrix ex = exp_nilpotent(a, e.value());
            out.numeric = to_eigen(ex);
        }
    } else if (!out.closed_form) {
        throw Error(ErrorKind::Domain, "ad has irrational or complex spectrum; a numeric eps is required");
    }
    return out;
}

AdjointMatrix adjoint_matrix(const QAlgebra& q, std::size_t i, const Expr& eps) {
    if (i >= q.dim) throw Error(ErrorKind::Domain, "basis index out of range");
    std::vector<Rational> x(q.dim, Rational(0));
    x[i] = 1;
    return adjoint_matrix(q, x, eps);
}

ExprMatrix multiply(const ExprMatrix& a, const ExprMatrix& b) {
    std::size_t n = a.size(), m = b.empty() ? 0 : b[0].size(), k = b.size();
    ExprMatrix out(n, std::vector<Expr>(m, Expr(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            std::vector<Expr> terms;
            for (std::size_t r = 0; r < k; ++r) terms.push_back(a[i][r] * b[r][j]);
            out[i][j] = expand(add(terms));
        }
    return out;
}

ExprMatrix substitute(const ExprMatrix& m, const std::map<std::string, Expr>& bindings) {
    ExprMatrix out = m;
    for (auto& row : out)
        for (auto& e : row) e = expand(substitute(e, bindings));
    return out;
}

std::string render(const ExprMatrix& m) {
    std::string s = "[";
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (i) s += "; ";
        for (std::size_t j = 0; j < m[i].size(); ++j) s += (j ? ", " : "") + render(m[i][j]);
    }
    return s + "]";
}

} // namespace liesym
