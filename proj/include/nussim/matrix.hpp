#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nussim::linalg {

/// Small dense row-major matrix of doubles. Sized for graph-scale problems
/// (a few hundred rows), not for large-scale linear algebra.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    Matrix transposed() const;

    /// m * v for a vector of length cols().
    std::vector<double> apply(std::span<const double> v) const;

    /// v' * m * v (quadratic form); requires a square matrix.
    double quadratic_form(std::span<const double> v) const;

    friend Matrix operator+(const Matrix& a, const Matrix& b);
    friend Matrix operator*(double s, const Matrix& m);
    friend bool operator==(const Matrix& a, const Matrix& b) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Eigenvalues of a symmetric matrix (cyclic Jacobi), ascending order.
/// The input is symmetrized as (m + m')/2 before iterating, so slightly
/// asymmetric inputs are tolerated.
std::vector<double> symmetric_eigenvalues(const Matrix& m);

}  // namespace nussim::linalg
