#include "tensorbit/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tensorbit {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_)
            throw std::invalid_argument("Matrix: ragged initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        m(i, i) = d[i];
    return m;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            t(j, i) = (*this)(i, j);
    return t;
}

Vector Matrix::column(std::size_t j) const {
    Vector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        v[i] = (*this)(i, j);
    return v;
}

Vector Matrix::row(std::size_t i) const {
    return Vector(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                  data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
}

Matrix& Matrix::operator+=(const Matrix& rhs) {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
        throw std::invalid_argument("Matrix +=: shape mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k)
        data_[k] += rhs.data_[k];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& rhs) {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
        throw std::invalid_argument("Matrix -=: shape mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k)
        data_[k] -= rhs.data_[k];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& x : data_)
        x *= s;
    return *this;
}

Matrix operator+(Matrix lhs, const Matrix& rhs) { return lhs += rhs; }
Matrix operator-(Matrix lhs, const Matrix& rhs) { return lhs -= rhs; }
Matrix operator*(Matrix m, double s) { return m *= s; }
Matrix operator*(double s, Matrix m) { return m *= s; }

Matrix operator*(const Matrix& lhs, const Matrix& rhs) {
    if (lhs.cols() != rhs.rows())
        throw std::invalid_argument("Matrix *: inner dimension mismatch");
    Matrix out(lhs.rows(), rhs.cols());
    for (std::size_t i = 0; i < lhs.rows(); ++i)
        for (std::size_t k = 0; k < lhs.cols(); ++k) {
            const double a = lhs(i, k);
            for (std::size_t j = 0; j < rhs.cols(); ++j)
                out(i, j) += a * rhs(k, j);
        }
    return out;
}

Vector operator*(const Matrix& m, std::span<const double> v) {
    if (m.cols() != v.size())
        throw std::invalid_argument("Matrix * vector: dimension mismatch");
    Vector out(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            out[i] += m(i, j) * v[j];
    return out;
}

double frobenius_norm(const Matrix& m) { return norm2(m.data()); }

double max_abs(const Matrix& m) { return max_abs(m.data()); }

double max_abs(std::span<const double> v) {
    double r = 0.0;
    for (double x : v)
        r = std::max(r, std::abs(x));
    return r;
}

double dot(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size())
        throw std::invalid_argument("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        s += u[i] * v[i];
    return s;
}

double norm2(std::span<const double> v) {
    double scale = 0.0, ssq = 1.0;
    for (double x : v) {
        if (x == 0.0)
            continue;
        const double ax = std::abs(x);
        if (scale < ax) {
            ssq = 1.0 + ssq * (scale / ax) * (scale / ax);
            scale = ax;
        } else {
            ssq += (ax / scale) * (ax / scale);
        }
    }
    return scale * std::sqrt(ssq);
}

double det2(const Matrix& m) {
    if (m.rows() != 2 || m.cols() != 2)
        throw std::invalid_argument("det2: expected a 2x2 matrix");
    return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
}

Matrix inverse2(const Matrix& m) {
    const double d = det2(m);
    if (d == 0.0)
        throw std::domain_error("inverse2: singular matrix");
    return Matrix{{m(1, 1) / d, -m(0, 1) / d}, {-m(1, 0) / d, m(0, 0) / d}};
}

Vector singular_values(const Matrix& m) {
    // Orthogonalize the columns of the narrow orientation; the column norms
    // at convergence are the singular values.
    Matrix a = m.cols() <= m.rows() ? m : m.transposed();
    const std::size_t n = a.cols();
    const std::size_t rows = a.rows();
    constexpr double eps = std::numeric_limits<double>::epsilon();

    for (int sweep = 0; sweep < 60; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t i = 0; i < rows; ++i) {
                    alpha += a(i, p) * a(i, p);
                    beta += a(i, q) * a(i, q);
                    gamma += a(i, p) * a(i, q);
                }
                if (gamma == 0.0 || std::abs(gamma) <= eps * std::sqrt(alpha * beta))
                    continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < rows; ++i) {
                    const double ap = a(i, p);
                    const double aq = a(i, q);
                    a(i, p) = c * ap - s * aq;
                    a(i, q) = s * ap + c * aq;
                }
            }
        }
        if (!rotated)
            break;
    }

    Vector sv(n);
    for (std::size_t j = 0; j < n; ++j)
        sv[j] = norm2(a.column(j));
    std::sort(sv.begin(), sv.end(), std::greater<>());
    return sv;
}

double condition_number(const Matrix& m) {
    const Vector sv = singular_values(m);
    if (sv.empty() || sv.back() == 0.0)
        return std::numeric_limits<double>::infinity();
    return sv.front() / sv.back();
}

int numerical_rank(const Matrix& m, double tol) {
    const Vector sv = singular_values(m);
    if (sv.empty() || sv.front() == 0.0)
        return 0;
    int r = 0;
    for (double s : sv)
        if (s > tol * sv.front())
            ++r;
    return r;
}

SymmetricEigen symmetric_eigen(const Matrix& m) {
    if (!m.square())
        throw std::invalid_argument("symmetric_eigen: matrix must be square");
    const std::size_t n = m.rows();
    Matrix a = m;
    Matrix v = Matrix::identity(n);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
                off += a(p, q) * a(p, q);
        if (off <= 1e-30 * std::max(1.0, frobenius_norm(a) * frobenius_norm(a)))
            break;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0)
                    continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = std::copysign(1.0, theta) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
    }
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
    SymmetricEigen out{Vector(n), Matrix(n, n)};
    for (std::size_t c = 0; c < n; ++c) {
        out.values[c] = a(order[c], order[c]);
        for (std::size_t r = 0; r < n; ++r)
            out.vectors(r, c) = v(r, order[c]);
    }
    return out;
}

Vector solve(Matrix a, Vector b) {
    const std::size_t n = a.rows();
    if (!a.square() || b.size() != n)
        throw std::invalid_argument("solve: dimension mismatch");
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k)))
                piv = i;
        if (a(piv, k) == 0.0)
            throw std::domain_error("solve: singular matrix");
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j)
                std::swap(a(k, j), a(piv, j));
            std::swap(b[k], b[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            for (std::size_t j = k; j < n; ++j)
                a(i, j) -= f * a(k, j);
            b[i] -= f * b[k];
        }
    }
    Vector x(n);
    for (std::size_t k = n; k-- > 0;) {
        double s = b[k];
        for (std::size_t j = k + 1; j < n; ++j)
            s -= a(k, j) * x[j];
        x[k] = s / a(k, k);
    }
    return x;
}

Vector least_squares(const Matrix& a, std::span<const double> b) {
    // Modified Gram-Schmidt: a = QR, then R x = Q^T b.
    const std::size_t m = a.rows(), n = a.cols();
    if (b.size() != m || n > m)
        throw std::invalid_argument("least_squares: bad shape");
    Matrix q = a;
    Matrix r(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < j; ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i)
                s += q(i, k) * q(i, j);
            r(k, j) = s;
            for (std::size_t i = 0; i < m; ++i)
                q(i, j) -= s * q(i, k);
        }
        const double nrm = norm2(q.column(j));
        if (nrm == 0.0)
            throw std::domain_error("least_squares: rank-deficient system");
        r(j, j) = nrm;
        for (std::size_t i = 0; i < m; ++i)
            q(i, j) /= nrm;
    }
    Vector qtb(n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < m; ++i)
            qtb[j] += q(i, j) * b[i];
    Vector x(n);
    for (std::size_t k = n; k-- > 0;) {
        double s = qtb[k];
        for (std::size_t j = k + 1; j < n; ++j)
            s -= r(k, j) * x[j];
        x[k] = s / r(k, k);
    }
    return x;
}

} // namespace tensorbit
