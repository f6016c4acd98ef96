#include "tensorbit/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tensorbit {

namespace {

void require_finite(std::span<const double> v, const char* who) {
    for (double x : v)
        if (!std::isfinite(x))
            throw std::invalid_argument(std::string(who) + ": non-finite entry");
}

void require_len(std::span<const double> v, int n, const char* who) {
    if (static_cast<int>(v.size()) != n)
        throw std::invalid_argument(std::string(who) + ": vector length " +
                                    std::to_string(v.size()) + " does not match mode dimension " +
                                    std::to_string(n));
}

// Shared kernels over any tensor with operator()(i,j,k) and dim(mode).
template <class T>
Matrix contract_impl(const T& x, std::span<const double> v, int mode) {
    if (mode < 1 || mode > 3)
        throw std::invalid_argument("contract_mode: mode must be 1, 2 or 3");
    require_len(v, x.dim(mode), "contract_mode");
    require_finite(v, "contract_mode");
    const int n1 = x.dim(1), n2 = x.dim(2), n3 = x.dim(3);
    if (mode == 3) {
        Matrix m(n1, n2);
        for (int i = 0; i < n1; ++i)
            for (int j = 0; j < n2; ++j)
                for (int k = 0; k < n3; ++k)
                    m(i, j) += v[k] * x(i, j, k);
        return m;
    }
    if (mode == 2) {
        Matrix m(n1, n3);
        for (int i = 0; i < n1; ++i)
            for (int j = 0; j < n2; ++j)
                for (int k = 0; k < n3; ++k)
                    m(i, k) += v[j] * x(i, j, k);
        return m;
    }
    Matrix m(n2, n3);
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j)
            for (int k = 0; k < n3; ++k)
                m(j, k) += v[i] * x(i, j, k);
    return m;
}

template <class T>
T transform_impl(const T& x, const Matrix& s, const Matrix& t, const Matrix& u) {
    const int n1 = x.dim(1), n2 = x.dim(2), n3 = x.dim(3);
    auto check = [](const Matrix& m, int n, const char* name) {
        if (static_cast<int>(m.rows()) != n || static_cast<int>(m.cols()) != n)
            throw std::invalid_argument(std::string("multilinear_transform: ") + name +
                                        " must be " + std::to_string(n) + "x" +
                                        std::to_string(n));
    };
    check(s, n1, "S");
    check(t, n2, "T");
    check(u, n3, "U");
    // One mode at a time keeps the cost at O(n^4) instead of O(n^6).
    T a = x, b = x;
    for (int i = 0; i < n1; ++i)
        for (int q = 0; q < n2; ++q)
            for (int r = 0; r < n3; ++r) {
                double acc = 0.0;
                for (int p = 0; p < n1; ++p)
                    acc += s(i, p) * x(p, q, r);
                a(i, q, r) = acc;
            }
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j)
            for (int r = 0; r < n3; ++r) {
                double acc = 0.0;
                for (int q = 0; q < n2; ++q)
                    acc += t(j, q) * a(i, q, r);
                b(i, j, r) = acc;
            }
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j)
            for (int k = 0; k < n3; ++k) {
                double acc = 0.0;
                for (int r = 0; r < n3; ++r)
                    acc += u(k, r) * b(i, j, r);
                a(i, j, k) = acc;
            }
    return a;
}

template <class T>
Matrix unfold_impl(const T& x, int mode) {
    const int n1 = x.dim(1), n2 = x.dim(2), n3 = x.dim(3);
    switch (mode) {
    case 1: {
        Matrix m(n1, n2 * n3);
        for (int i = 0; i < n1; ++i)
            for (int j = 0; j < n2; ++j)
                for (int k = 0; k < n3; ++k)
                    m(i, k * n2 + j) = x(i, j, k);
        return m;
    }
    case 2: {
        Matrix m(n2, n1 * n3);
        for (int i = 0; i < n1; ++i)
            for (int j = 0; j < n2; ++j)
                for (int k = 0; k < n3; ++k)
                    m(j, k * n1 + i) = x(i, j, k);
        return m;
    }
    case 3: {
        Matrix m(n3, n1 * n2);
        for (int i = 0; i < n1; ++i)
            for (int j = 0; j < n2; ++j)
                for (int k = 0; k < n3; ++k)
                    m(k, j * n1 + i) = x(i, j, k);
        return m;
    }
    default:
        throw std::invalid_argument("unfold: mode must be 1, 2 or 3");
    }
}

template <class T>
MultilinearRank mlrank_impl(const T& x, double tol) {
    if (!(tol > 0.0))
        throw std::invalid_argument("multilinear_rank: tol must be positive");
    return {numerical_rank(unfold_impl(x, 1), tol), numerical_rank(unfold_impl(x, 2), tol),
            numerical_rank(unfold_impl(x, 3), tol)};
}

} // namespace

Tensor222::Tensor222(const std::array<double, 8>& entries) : entries_(entries) {
    require_finite(entries_, "Tensor222");
}

Tensor222::Tensor222(const Matrix& x1, const Matrix& x2) {
    if (x1.rows() != 2 || x1.cols() != 2 || x2.rows() != 2 || x2.cols() != 2)
        throw std::invalid_argument("Tensor222: slabs must be 2x2");
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            entries_[index(i, j, 0)] = x1(i, j);
            entries_[index(i, j, 1)] = x2(i, j);
        }
    require_finite(entries_, "Tensor222");
}

Tensor222 Tensor222::from_span(std::span<const double> entries) {
    if (entries.size() != 8)
        throw std::invalid_argument("Tensor222: expected 8 entries, got " +
                                    std::to_string(entries.size()));
    std::array<double, 8> a{};
    std::copy(entries.begin(), entries.end(), a.begin());
    return Tensor222(a);
}

Matrix Tensor222::slab(int k) const {
    if (k != 0 && k != 1)
        throw std::invalid_argument("Tensor222::slab: index must be 0 or 1");
    return Matrix{{(*this)(0, 0, k), (*this)(0, 1, k)}, {(*this)(1, 0, k), (*this)(1, 1, k)}};
}

Tensor222& Tensor222::operator+=(const Tensor222& rhs) {
    for (std::size_t n = 0; n < 8; ++n)
        entries_[n] += rhs.entries_[n];
    return *this;
}

Tensor222& Tensor222::operator-=(const Tensor222& rhs) {
    for (std::size_t n = 0; n < 8; ++n)
        entries_[n] -= rhs.entries_[n];
    return *this;
}

Tensor222& Tensor222::operator*=(double s) {
    for (double& v : entries_)
        v *= s;
    return *this;
}

Tensor222 operator+(Tensor222 lhs, const Tensor222& rhs) { return lhs += rhs; }
Tensor222 operator-(Tensor222 lhs, const Tensor222& rhs) { return lhs -= rhs; }
Tensor222 operator*(double s, Tensor222 x) { return x *= s; }

TensorPxPx2::TensorPxPx2(int p) : p_(p) {
    if (p < 2)
        throw std::invalid_argument("TensorPxPx2: p must be at least 2");
    entries_.assign(static_cast<std::size_t>(2 * p * p), 0.0);
}

TensorPxPx2::TensorPxPx2(int p, std::span<const double> entries) : TensorPxPx2(p) {
    if (entries.size() != entries_.size())
        throw std::invalid_argument("TensorPxPx2: expected " + std::to_string(entries_.size()) +
                                    " entries, got " + std::to_string(entries.size()));
    require_finite(entries, "TensorPxPx2");
    std::copy(entries.begin(), entries.end(), entries_.begin());
}

TensorPxPx2::TensorPxPx2(const Matrix& x1, const Matrix& x2)
    : TensorPxPx2(static_cast<int>(x1.rows())) {
    if (!x1.square() || x2.rows() != x1.rows() || x2.cols() != x1.cols())
        throw std::invalid_argument("TensorPxPx2: slabs must be equal-size square matrices");
    for (int i = 0; i < p_; ++i)
        for (int j = 0; j < p_; ++j) {
            (*this)(i, j, 0) = x1(i, j);
            (*this)(i, j, 1) = x2(i, j);
        }
    require_finite(entries_, "TensorPxPx2");
}

TensorPxPx2::TensorPxPx2(const Tensor222& x) : TensorPxPx2(2, x.entries()) {}

Matrix TensorPxPx2::slab(int k) const {
    if (k != 0 && k != 1)
        throw std::invalid_argument("TensorPxPx2::slab: index must be 0 or 1");
    Matrix m(p_, p_);
    for (int i = 0; i < p_; ++i)
        for (int j = 0; j < p_; ++j)
            m(i, j) = (*this)(i, j, k);
    return m;
}

Tensor222 TensorPxPx2::to_222() const {
    if (p_ != 2)
        throw std::invalid_argument("TensorPxPx2::to_222: p must be 2");
    return Tensor222::from_span(entries_);
}

TensorPxPx2& TensorPxPx2::operator-=(const TensorPxPx2& rhs) {
    if (p_ != rhs.p_)
        throw std::invalid_argument("TensorPxPx2 -=: dimension mismatch");
    for (std::size_t n = 0; n < entries_.size(); ++n)
        entries_[n] -= rhs.entries_[n];
    return *this;
}

TensorPxPx2 operator-(TensorPxPx2 lhs, const TensorPxPx2& rhs) { return lhs -= rhs; }

Tensor222 Rank1Term::evaluate222() const {
    if (x.size() != 2 || y.size() != 2 || z.size() != 2)
        throw std::invalid_argument("Rank1Term::evaluate222: factors must be 2-vectors");
    return outer222(x, y, z);
}

TensorPxPx2 Rank1Term::evaluate() const {
    if (x.size() != y.size() || z.size() != 2 || x.size() < 2)
        throw std::invalid_argument("Rank1Term::evaluate: factor lengths must be (p, p, 2)");
    const int p = static_cast<int>(x.size());
    TensorPxPx2 t(p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            for (int k = 0; k < 2; ++k)
                t(i, j, k) = x[i] * y[j] * z[k];
    return t;
}

Matrix contract_mode(const Tensor222& x, std::span<const double> v, int mode) {
    return contract_impl(x, v, mode);
}

Matrix contract_mode(const TensorPxPx2& x, std::span<const double> v, int mode) {
    return contract_impl(x, v, mode);
}

Tensor222 multilinear_transform(const Tensor222& x, const Matrix& s, const Matrix& t,
                                const Matrix& u) {
    return transform_impl(x, s, t, u);
}

TensorPxPx2 multilinear_transform(const TensorPxPx2& x, const Matrix& s, const Matrix& t,
                                  const Matrix& u) {
    return transform_impl(x, s, t, u);
}

double frobenius_norm_sq(const Tensor222& x) {
    double s = 0.0;
    for (double v : x.entries())
        s += v * v;
    return s;
}

double frobenius_norm_sq(const TensorPxPx2& x) {
    double s = 0.0;
    for (double v : x.entries())
        s += v * v;
    return s;
}

double inner(const Tensor222& x, const Tensor222& y) { return dot(x.entries(), y.entries()); }

double max_abs(const Tensor222& x) { return max_abs(std::span<const double>(x.entries())); }
double max_abs(const TensorPxPx2& x) { return max_abs(x.entries()); }

Matrix unfold(const Tensor222& x, int mode) { return unfold_impl(x, mode); }
Matrix unfold(const TensorPxPx2& x, int mode) { return unfold_impl(x, mode); }

MultilinearRank multilinear_rank(const Tensor222& x, double tol) { return mlrank_impl(x, tol); }
MultilinearRank multilinear_rank(const TensorPxPx2& x, double tol) {
    return mlrank_impl(x, tol);
}

Tensor222 outer222(std::span<const double> x, std::span<const double> y,
                   std::span<const double> z) {
    if (x.size() != 2 || y.size() != 2 || z.size() != 2)
        throw std::invalid_argument("outer222: factors must be 2-vectors");
    Tensor222 t;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                t(i, j, k) = x[i] * y[j] * z[k];
    return t;
}

} // namespace tensorbit
