#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "tensorbit/matrix.hpp"

namespace tensorbit {

/// Dense real 2x2x2 tensor stored slab-major as [a,b,c,d,e,f,g,h] with
/// X1 = [a b; c d] and X2 = [e f; g h]. Element (i,j,k) is row i, column j
/// of slab k.
class Tensor222 {
public:
    Tensor222() { entries_.fill(0.0); }
    explicit Tensor222(const std::array<double, 8>& entries);
    Tensor222(const Matrix& x1, const Matrix& x2);

    static Tensor222 from_span(std::span<const double> entries);

    double operator()(int i, int j, int k) const { return entries_[index(i, j, k)]; }
    double& operator()(int i, int j, int k) { return entries_[index(i, j, k)]; }

    double a() const { return entries_[0]; }
    double b() const { return entries_[1]; }
    double c() const { return entries_[2]; }
    double d() const { return entries_[3]; }
    double e() const { return entries_[4]; }
    double f() const { return entries_[5]; }
    double g() const { return entries_[6]; }
    double h() const { return entries_[7]; }

    Matrix slab(int k) const;
    const std::array<double, 8>& entries() const noexcept { return entries_; }

    Tensor222& operator+=(const Tensor222& rhs);
    Tensor222& operator-=(const Tensor222& rhs);
    Tensor222& operator*=(double s);
    bool operator==(const Tensor222&) const = default;

    static constexpr int dim(int /*mode*/) { return 2; }

private:
    static constexpr std::size_t index(int i, int j, int k) {
        return static_cast<std::size_t>(k * 4 + i * 2 + j);
    }
    std::array<double, 8> entries_;
};

Tensor222 operator+(Tensor222 lhs, const Tensor222& rhs);
Tensor222 operator-(Tensor222 lhs, const Tensor222& rhs);
Tensor222 operator*(double s, Tensor222 x);

/// Real p x p x 2 tensor, element (i,j,k) at k*p*p + i*p + j.
class TensorPxPx2 {
public:
    TensorPxPx2() = default;
    explicit TensorPxPx2(int p);
    TensorPxPx2(int p, std::span<const double> entries);
    TensorPxPx2(const Matrix& x1, const Matrix& x2);
    explicit TensorPxPx2(const Tensor222& x);

    int p() const noexcept { return p_; }
    int dim(int mode) const { return mode == 3 ? 2 : p_; }

    double operator()(int i, int j, int k) const { return entries_[index(i, j, k)]; }
    double& operator()(int i, int j, int k) { return entries_[index(i, j, k)]; }

    Matrix slab(int k) const;
    std::span<const double> entries() const noexcept { return entries_; }
    Tensor222 to_222() const;

    TensorPxPx2& operator-=(const TensorPxPx2& rhs);
    bool operator==(const TensorPxPx2&) const = default;

private:
    std::size_t index(int i, int j, int k) const {
        return static_cast<std::size_t>(k * p_ * p_ + i * p_ + j);
    }
    int p_ = 0;
    std::vector<double> entries_;
};

TensorPxPx2 operator-(TensorPxPx2 lhs, const TensorPxPx2& rhs);

/// Outer-product term x (mode 1) * y (mode 2) * z (mode 3).
struct Rank1Term {
    Vector x;
    Vector y;
    Vector z;

    Tensor222 evaluate222() const;
    TensorPxPx2 evaluate() const;
};

struct MultilinearRank {
    int r1 = 0;
    int r2 = 0;
    int r3 = 0;
    bool operator==(const MultilinearRank&) const = default;
};

/// X contracted with v in the given mode (1, 2 or 3). The result keeps the
/// remaining two modes in increasing order as (rows, columns).
Matrix contract_mode(const Tensor222& x, std::span<const double> v, int mode);
Matrix contract_mode(const TensorPxPx2& x, std::span<const double> v, int mode);

/// X~_ijk = sum S_ip T_jq U_kr X_pqr.
Tensor222 multilinear_transform(const Tensor222& x, const Matrix& s, const Matrix& t,
                                const Matrix& u);
TensorPxPx2 multilinear_transform(const TensorPxPx2& x, const Matrix& s, const Matrix& t,
                                  const Matrix& u);

double frobenius_norm_sq(const Tensor222& x);
double frobenius_norm_sq(const TensorPxPx2& x);
double inner(const Tensor222& x, const Tensor222& y);
double max_abs(const Tensor222& x);
double max_abs(const TensorPxPx2& x);

/// Mode-n unfolding: rows indexed by the mode-n index.
Matrix unfold(const Tensor222& x, int mode);
Matrix unfold(const TensorPxPx2& x, int mode);

MultilinearRank multilinear_rank(const Tensor222& x, double tol = 1e-9);
MultilinearRank multilinear_rank(const TensorPxPx2& x, double tol = 1e-9);

/// x (x) y (x) z for 2-vectors.
Tensor222 outer222(std::span<const double> x, std::span<const double> y,
                   std::span<const double> z);

} // namespace tensorbit
