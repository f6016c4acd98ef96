#pragma once

// Independent reference computations used by the tests. Nothing here calls
// the library's solvers; only its value types are shared.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "tensorbit/orbits.hpp"
#include "tensorbit/tensor.hpp"

namespace oracle {

using tensorbit::Matrix;
using tensorbit::SymTensor222;
using tensorbit::Tensor222;
using tensorbit::TensorPxPx2;
using tensorbit::Vector;

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed * 0x9E3779B97F4A7C15ULL + 17); }

inline Tensor222 random_tensor(std::mt19937_64& g) {
    std::normal_distribution<double> n;
    std::array<double, 8> v{};
    for (double& e : v)
        e = n(g);
    return Tensor222(v);
}

inline SymTensor222 random_sym(std::mt19937_64& g) {
    std::normal_distribution<double> n;
    return {n(g), n(g), n(g), n(g)};
}

inline TensorPxPx2 random_pxpx2(std::mt19937_64& g, int p) {
    std::normal_distribution<double> n;
    std::vector<double> v(static_cast<std::size_t>(2 * p * p));
    for (double& e : v)
        e = n(g);
    return TensorPxPx2(p, v);
}

inline Matrix random_matrix(std::mt19937_64& g, int rows, int cols) {
    std::normal_distribution<double> n;
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            m(i, j) = n(g);
    return m;
}

inline Matrix random_rotation(std::mt19937_64& g) {
    std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
    const double t = u(g);
    const double s = std::bernoulli_distribution(0.5)(g) ? 1.0 : -1.0;
    return Matrix{{std::cos(t), -std::sin(t)}, {s * std::sin(t), s * std::cos(t)}};
}

/// Entry (i,j,k) by explicit index arithmetic, independent of the class.
inline double entry(const Tensor222& x, int i, int j, int k) { return x.entries()[k * 4 + i * 2 + j]; }

inline double psi_direct(const Tensor222& x, const Vector& a, const Vector& b, const Vector& c) {
    double s = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                const double r = entry(x, i, j, k) - a[i] * b[j] * c[k];
                s += r * r;
            }
    return s;
}

inline double psi_direct(const TensorPxPx2& x, const Vector& a, const Vector& b, const Vector& c) {
    double s = 0.0;
    const int p = x.p();
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            for (int k = 0; k < 2; ++k) {
                const double r = x.entries()[k * p * p + i * p + j] - a[i] * b[j] * c[k];
                s += r * r;
            }
    return s;
}

inline Tensor222 transform_direct(const Tensor222& x, const Matrix& s, const Matrix& t, const Matrix& u) {
    std::array<double, 8> out{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                double v = 0.0;
                for (int p = 0; p < 2; ++p)
                    for (int q = 0; q < 2; ++q)
                        for (int r = 0; r < 2; ++r)
                            v += s(i, p) * t(j, q) * u(k, r) * entry(x, p, q, r);
                out[k * 4 + i * 2 + j] = v;
            }
    return Tensor222(out);
}

inline double det2(double a, double b, double c, double d) { return a * d - b * c; }

/// Discriminant of det(X1 + t X2) as a quadratic in t.
inline double delta_via_pencil(const Tensor222& x) {
    const auto& v = x.entries();
    const double d1 = det2(v[0], v[1], v[2], v[3]);
    const double d2 = det2(v[4], v[5], v[6], v[7]);
    const double d12 = det2(v[0] + v[4], v[1] + v[5], v[2] + v[6], v[3] + v[7]);
    const double mid = d12 - d1 - d2;
    return mid * mid - 4.0 * d1 * d2;
}

/// Textbook discriminant of A u^3 + B u^2 + C u + D.
inline double cubic_disc(double a, double b, double c, double d) {
    return 18.0 * a * b * c * d - 4.0 * b * b * b * d + b * b * c * c - 4.0 * a * c * c * c -
           27.0 * a * a * d * d;
}

inline Tensor222 sym_full(const SymTensor222& s) {
    return Tensor222(std::array<double, 8>{s.a, s.b, s.b, s.c, s.b, s.c, s.c, s.d});
}

inline SymTensor222 sym_from_vectors(const std::vector<Vector>& vs) {
    SymTensor222 s;
    for (const Vector& v : vs) {
        s.a += v[0] * v[0] * v[0];
        s.b += v[0] * v[0] * v[1];
        s.c += v[0] * v[1] * v[1];
        s.d += v[1] * v[1] * v[1];
    }
    return s;
}

inline double sym_max_abs(const SymTensor222& s) {
    return std::max({std::abs(s.a), std::abs(s.b), std::abs(s.c), std::abs(s.d)});
}

inline double sym_diff(const SymTensor222& x, const SymTensor222& y) {
    return std::max({std::abs(x.a - y.a), std::abs(x.b - y.b), std::abs(x.c - y.c), std::abs(x.d - y.d)});
}

inline double frob_diff(const Tensor222& x, const Tensor222& y) {
    double s = 0.0;
    for (int n = 0; n < 8; ++n)
        s += (x.entries()[n] - y.entries()[n]) * (x.entries()[n] - y.entries()[n]);
    return std::sqrt(s);
}

inline double max_diff(const Tensor222& x, const Tensor222& y) {
    double m = 0.0;
    for (int n = 0; n < 8; ++n)
        m = std::max(m, std::abs(x.entries()[n] - y.entries()[n]));
    return m;
}

/// Central-difference gradient of the full criterion in (x1,x2,y1,y2,z1,z2).
inline std::array<double, 6> psi_gradient_fd(const Tensor222& x, const Vector& a, const Vector& b,
                                             const Vector& c) {
    std::array<double, 6> g{};
    for (int n = 0; n < 6; ++n) {
        const double base = n < 2 ? a[n] : n < 4 ? b[n - 2] : c[n - 4];
        const double h = 1e-6 * (1.0 + std::abs(base));
        auto eval = [&](double delta) {
            Vector aa = a, bb = b, cc = c;
            (n < 2 ? aa[n] : n < 4 ? bb[n - 2] : cc[n - 4]) += delta;
            return psi_direct(x, aa, bb, cc);
        };
        g[n] = (eval(h) - eval(-h)) / (2.0 * h);
    }
    return g;
}

/// Criterion with x eliminated, unit y and z given by angles.
inline double psi_angles(const Tensor222& x, double t, double u) {
    const double y[2] = {std::cos(t), std::sin(t)};
    const double z[2] = {std::cos(u), std::sin(u)};
    double nx2 = 0.0, proj2 = 0.0;
    for (int n = 0; n < 8; ++n)
        nx2 += x.entries()[n] * x.entries()[n];
    for (int i = 0; i < 2; ++i) {
        double v = 0.0;
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                v += entry(x, i, j, k) * y[j] * z[k];
        proj2 += v * v;
    }
    return nx2 - proj2;
}

struct GridResult {
    double grid_min = 0.0;
    double refined_min = 0.0;
    double t = 0.0;
    double u = 0.0;
};

/// Exhaustive n x n grid over [0, pi)^2, then compass search from the best
/// cell until the step falls below 1e-12.
inline GridResult grid_search_psi(const Tensor222& x, int n = 400) {
    GridResult r;
    r.grid_min = std::numeric_limits<double>::infinity();
    const double step = std::numbers::pi / n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double v = psi_angles(x, i * step, j * step);
            if (v < r.grid_min) {
                r.grid_min = v;
                r.t = i * step;
                r.u = j * step;
            }
        }
    double best = r.grid_min, h = step;
    while (h > 1e-12) {
        bool moved = false;
        const double dirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (const auto& d : dirs) {
            const double v = psi_angles(x, r.t + h * d[0], r.u + h * d[1]);
            if (v < best) {
                best = v;
                r.t += h * d[0];
                r.u += h * d[1];
                moved = true;
            }
        }
        if (!moved)
            h *= 0.5;
    }
    r.refined_min = best;
    return r;
}

/// Sylvester g-vector of a symmetric tensor.
inline std::array<double, 3> sylvester_g(const SymTensor222& s) {
    return {s.a * s.c - s.b * s.b, s.b * s.c - s.a * s.d, s.b * s.d - s.c * s.c};
}

/// Value of sum c_k u^k together with sum |c_k| |u|^k, the scale against
/// which rounding in the evaluation is measured.
struct PolyEval {
    double value = 0.0;
    double magnitude = 0.0;
};

inline PolyEval poly_eval(const std::vector<double>& c, double u) {
    PolyEval e;
    for (std::size_t k = c.size(); k-- > 0;) {
        e.value = e.value * u + c[k];
        e.magnitude = e.magnitude * std::abs(u) + std::abs(c[k]);
    }
    return e;
}

inline PolyEval operator*(PolyEval l, PolyEval r) { return {l.value * r.value, l.magnitude * r.magnitude}; }

/// |L - R| relative to the evaluation magnitudes of both sides.
inline double identity_error(PolyEval l, PolyEval r) {
    return std::abs(l.value - r.value) / std::max(l.magnitude + r.magnitude, 1e-300);
}

/// The five quotient identities between the stationarity polynomials at u;
/// returns the worst error. Arguments are the coefficient vectors of
/// P_z^stat, P_z^eig1, P_z^eig2, P_z^com, P_y^stat, P_y^eig1, P_y^eig2.
inline double quotient_identity_error(const Tensor222& x, const std::vector<double>& pz_stat,
                                      const std::vector<double>& pz_eig1, const std::vector<double>& pz_eig2,
                                      const std::vector<double>& pz_com, const std::vector<double>& py_stat,
                                      const std::vector<double>& py_eig1, const std::vector<double>& py_eig2,
                                      double u) {
    const auto& v = x.entries();
    const double a = v[0], b = v[1], c = v[2], d = v[3], e = v[4], f = v[5], g = v[6], h = v[7];
    const double s = a * h - b * g + d * e - c * f;
    const double r = a * h + b * g - d * e - c * f;
    const PolyEval numz = poly_eval({a * d - b * c, s, e * h - f * g}, u);
    const PolyEval denz2 = poly_eval({e * h - f * g, -s, a * d - b * c}, u);
    const PolyEval denz3 = poly_eval({a * b + c * d, a * f + b * e + c * h + d * g, e * f + g * h}, u);
    const PolyEval numy = poly_eval({c * e - a * g, -r, d * f - b * h}, u);
    const PolyEval deny = poly_eval({d * f - b * h, r, c * e - a * g}, u);
    const PolyEval zs = poly_eval(pz_stat, u), ys = poly_eval(py_stat, u);
    return std::max({identity_error(zs, poly_eval(pz_eig1, u)),
                     identity_error(zs * denz2, poly_eval(pz_eig2, u) * numz),
                     identity_error(zs * denz3, poly_eval(pz_com, u) * numz),
                     identity_error(ys, poly_eval(py_eig2, u)),
                     identity_error(ys * deny, poly_eval(py_eig1, u) * numy)});
}

} // namespace oracle
