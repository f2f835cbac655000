#pragma once

#include "liesym/rational.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace liesym {

/// Dense matrix over the rationals.
class QMatrix {
public:
    QMatrix() = default;
    QMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, Rational(0)) {}
    static QMatrix identity(std::size_t n);
    static QMatrix from_rows(const std::vector<std::vector<Rational>>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Rational& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const Rational& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    std::vector<Rational> row(std::size_t i) const;
    std::vector<Rational> col(std::size_t j) const;
    QMatrix transpose() const;

    bool operator==(const QMatrix& o) const;
    QMatrix operator*(const QMatrix& o) const;
    std::vector<Rational> operator*(const std::vector<Rational>& v) const;
    QMatrix operator+(const QMatrix& o) const;
    QMatrix operator-(const QMatrix& o) const;
    QMatrix scaled(const Rational& s) const;

    /// Reduced row echelon form in place; returns pivot columns.
    std::vector<std::size_t> rref();
    std::size_t rank() const;
    /// Basis of {v : A v = 0}; each vector has a 1 at its free column.
    std::vector<std::vector<Rational>> nullspace() const;
    Rational determinant() const;
    bool invertible() const { return rows_ == cols_ && determinant() != 0; }
    QMatrix inverse() const;
    /// Some solution of A x = b, or empty when inconsistent.
    bool solve(const std::vector<Rational>& b, std::vector<Rational>& x) const;
    bool is_zero() const;

    std::string render() const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Rational> a_;
};

bool is_zero_vector(const std::vector<Rational>& v);

} // namespace liesym
