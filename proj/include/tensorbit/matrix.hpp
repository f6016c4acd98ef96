#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace tensorbit {

using Vector = std::vector<double>;

/// Small dense row-major matrix. Sized for the 2x2 .. 16x16 problems in
/// this library; no expression templates, no aliasing tricks.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    static Matrix diagonal(std::span<const double> d);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const double> data() const noexcept { return data_; }

    Matrix transposed() const;
    Vector column(std::size_t j) const;
    Vector row(std::size_t i) const;

    Matrix& operator+=(const Matrix& rhs);
    Matrix& operator-=(const Matrix& rhs);
    Matrix& operator*=(double s);

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator+(Matrix lhs, const Matrix& rhs);
Matrix operator-(Matrix lhs, const Matrix& rhs);
Matrix operator*(Matrix m, double s);
Matrix operator*(double s, Matrix m);
Matrix operator*(const Matrix& lhs, const Matrix& rhs);
Vector operator*(const Matrix& m, std::span<const double> v);

double frobenius_norm(const Matrix& m);
double max_abs(const Matrix& m);
double max_abs(std::span<const double> v);
double dot(std::span<const double> u, std::span<const double> v);
double norm2(std::span<const double> v);

/// Determinant and inverse of a 2x2 matrix (closed form).
double det2(const Matrix& m);
Matrix inverse2(const Matrix& m);

/// Singular values in descending order, one-sided Jacobi on the narrow side.
Vector singular_values(const Matrix& m);

/// Ratio sigma_max / sigma_min; +inf for a singular matrix.
double condition_number(const Matrix& m);

/// Count of singular values strictly above tol * sigma_max.
int numerical_rank(const Matrix& m, double tol);

struct SymmetricEigen {
    Vector values;  // descending
    Matrix vectors; // column j pairs with values[j]
};

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix.
SymmetricEigen symmetric_eigen(const Matrix& m);

/// Dense LU solve with partial pivoting; throws std::domain_error if singular.
Vector solve(Matrix a, Vector b);

/// Least-squares solution of a tall system via normal equations of a
/// Householder-free Gram-Schmidt QR. Adequate for the 4x2 / 4x3 systems used
/// by the symmetric decompositions.
Vector least_squares(const Matrix& a, std::span<const double> b);

} // namespace tensorbit
