#include "liesym/linalg.hpp"

#include "liesym/error.hpp"

namespace liesym {

QMatrix QMatrix::identity(std::size_t n) {
    QMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

QMatrix QMatrix::from_rows(const std::vector<std::vector<Rational>>& rows) {
    if (rows.empty()) return QMatrix();
    QMatrix m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols_) throw Error(ErrorKind::Domain, "ragged matrix rows");
        for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

std::vector<Rational> QMatrix::row(std::size_t i) const {
    return std::vector<Rational>(a_.begin() + i * cols_, a_.begin() + (i + 1) * cols_);
}

std::vector<Rational> QMatrix::col(std::size_t j) const {
    std::vector<Rational> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
}

QMatrix QMatrix::transpose() const {
    QMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

bool QMatrix::operator==(const QMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_; }

QMatrix QMatrix::operator*(const QMatrix& o) const {
    if (cols_ != o.rows_) throw Error(ErrorKind::Domain, "matrix size mismatch");
    QMatrix r(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            const Rational& v = (*this)(i, k);
            if (v == 0) continue;
            for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += v * o(k, j);
        }
    return r;
}

std::vector<Rational> QMatrix::operator*(const std::vector<Rational>& v) const {
    if (cols_ != v.size()) throw Error(ErrorKind::Domain, "matrix-vector size mismatch");
    std::vector<Rational> r(rows_, Rational(0));
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) r[i] += (*this)(i, j) * v[j];
    return r;
}

QMatrix QMatrix::operator+(const QMatrix& o) const {
    QMatrix r = *this;
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] += o.a_[i];
    return r;
}

QMatrix QMatrix::operator-(const QMatrix& o) const {
    QMatrix r = *this;
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] -= o.a_[i];
    return r;
}

QMatrix QMatrix::scaled(const Rational& s) const {
    QMatrix r = *this;
    for (auto& v : r.a_) v *= s;
    return r;
}

std::vector<std::size_t> QMatrix::rref() {
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols_ && r < rows_; ++c) {
        std::size_t piv = rows_;
        for (std::size_t i = r; i < rows_; ++i)
            if ((*this)(i, c) != 0) {
                piv = i;
                break;
            }
        if (piv == rows_) continue;
        if (piv != r)
            for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(piv, j), (*this)(r, j));
        Rational inv = 1 / (*this)(r, c);
        for (std::size_t j = c; j < cols_; ++j) (*this)(r, j) *= inv;
        for (std::size_t i = 0; i < rows_; ++i) {
            if (i == r) continue;
            Rational f = (*this)(i, c);
            if (f == 0) continue;
            for (std::size_t j = c; j < cols_; ++j) (*this)(i, j) -= f * (*this)(r, j);
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

std::size_t QMatrix::rank() const {
    QMatrix m = *this;
    return m.rref().size();
}

std::vector<std::vector<Rational>> QMatrix::nullspace() const {
    QMatrix m = *this;
    auto piv = m.rref();
    std::vector<bool> is_pivot(cols_, false);
    for (auto c : piv) is_pivot[c] = true;
    std::vector<std::vector<Rational>> basis;
    for (std::size_t f = 0; f < cols_; ++f) {
        if (is_pivot[f]) continue;
        std::vector<Rational> v(cols_, Rational(0));
        v[f] = 1;
        for (std::size_t i = 0; i < piv.size(); ++i) v[piv[i]] = -m(i, f);
        basis.push_back(v);
    }
    return basis;
}

Rational QMatrix::determinant() const {
    if (rows_ != cols_) throw Error(ErrorKind::Domain, "determinant of non-square matrix");
    QMatrix m = *this;
    Rational det = 1;
    std::size_t n = rows_;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = n;
        for (std::size_t i = c; i < n; ++i)
            if (m(i, c) != 0) {
                piv = i;
                break;
            }
        if (piv == n) return Rational(0);
        if (piv != c) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(piv, j), m(c, j));
            det = -det;
        }
        det *= m(c, c);
        Rational inv = 1 / m(c, c);
        for (std::size_t i = c + 1; i < n; ++i) {
            Rational f = m(i, c) * inv;
            if (f == 0) continue;
            for (std::size_t j = c; j < n; ++j) m(i, j) -= f * m(c, j);
        }
    }
    return det;
}

QMatrix QMatrix::inverse() const {
    if (rows_ != cols_) throw Error(ErrorKind::Domain, "inverse of non-square matrix");
    std::size_t n = rows_;
    QMatrix aug(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug(i, j) = (*this)(i, j);
        aug(i, n + i) = 1;
    }
    auto piv = aug.rref();
    if (piv.size() < n || piv[n - 1] != n - 1) throw Error(ErrorKind::NonInvertible, "singular matrix");
    QMatrix inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
    return inv;
}

bool QMatrix::solve(const std::vector<Rational>& b, std::vector<Rational>& x) const {
    QMatrix aug(rows_, cols_ + 1);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) aug(i, j) = (*this)(i, j);
        aug(i, cols_) = b[i];
    }
    auto piv = aug.rref();
    if (!piv.empty() && piv.back() == cols_) return false;
    x.assign(cols_, Rational(0));
    for (std::size_t i = 0; i < piv.size(); ++i) x[piv[i]] = aug(i, cols_);
    return true;
}

bool QMatrix::is_zero() const {
    for (const auto& v : a_)
        if (v != 0) return false;
    return true;
}

std::string QMatrix::render() const {
    std::string out = "[";
    for (std::size_t i = 0; i < rows_; ++i) {
        if (i) out += "; ";
        for (std::size_t j = 0; j < cols_; ++j) {
            if (j) out += ", ";
            out += liesym::render((*this)(i, j));
        }
    }
    return out + "]";
}

bool is_zero_vector(const std::vector<Rational>& v) {
    for (const auto& x : v)
        if (x != 0) return false;
    return true;
}

} // namespace liesym
