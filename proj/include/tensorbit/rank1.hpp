#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tensorbit/orbits.hpp"
#include "tensorbit/smallalg.hpp"
#include "tensorbit/tensor.hpp"

namespace tensorbit {

/// ||X - x (x) y (x) z||^2, summed entrywise.
double psi(const Tensor222& x, const Rank1Term& term);
double psi(const TensorPxPx2& x, const Rank1Term& term);

/// Least-squares mode-1 factor for fixed y, z: (X .2 y .3 z) / (|y|^2 |z|^2).
Vector optimal_x(const Tensor222& x, std::span<const double> y, std::span<const double> z);
Vector optimal_x(const TensorPxPx2& x, std::span<const double> y, std::span<const double> z);

/// Criterion with x eliminated, in the chart y = (1, y2), z = (1, z2).
double reduced_psi(const Tensor222& x, double y2, double z2);

/// Stationary point in the chart y1 = z1 = 1.
struct StationaryPoint {
    double y2 = 0.0;
    double z2 = 0.0;
    Vector x;
    double psi = 0.0;
    double delta_residual = 0.0; // hyperdeterminant of X - x(x)y(x)z
    bool hessian_pd = false;
    bool degenerate = false;     // x vanishes, criterion equals ||X||^2
    double equation_residual = 0.0;

    Rank1Term term() const { return {x, {1.0, y2}, {1.0, z2}}; }
};

struct StationarySet {
    std::vector<StationaryPoint> points; // non-degenerate by psi, then degenerate
    int polynomial_degree = 0;
    int n_real_roots = 0;
    int n_complex_roots = 0;
    bool reduced_degree = false;  // leading coefficient collapsed
    bool system_degenerate = false; // stationarity polynomial vanished identically
    double min_root_separation = 0.0;
};

/// Both stationarity equations and the Delta(X - Y) = 0 locus, each written
/// as a quadratic in y2 (coefficients polynomial in z2) and as a quadratic in
/// z2 (coefficients polynomial in y2).
struct StationarySystem {
    QuadraticPencil eq1_y, eq2_y, delta_y;
    QuadraticPencil eq1_z, eq2_z, delta_z;
};
StationarySystem stationary_system(const Tensor222& x);

/// Degree-8 polynomials whose roots carry the stationary points (stat), the
/// points of one equation on the Delta locus (eig1, eig2), and the agreement
/// of the two common-root formulas (com).
struct StationaryPolynomials {
    Polynomial pz_stat, pz_eig1, pz_eig2, pz_com;
    Polynomial py_stat, py_eig1, py_eig2;
};
StationaryPolynomials stationary_polynomials(const Tensor222& x);

StationarySet stationary_points_222(const Tensor222& x);

struct SymStationaryPoint {
    double z = 0.0; // y1 / y2, +inf when y2 = 0
    Vector y;
    double psi = 0.0;
    double delta_residual = 0.0;
    double gradient_residual = 0.0;
};

std::vector<SymStationaryPoint> stationary_points_sym(const SymTensor222& xs);

struct BestRank1Result {
    Rank1Term term;
    double psi = 0.0;
    std::vector<StationaryPoint> all_points;
    std::vector<SymStationaryPoint> sym_points;
    int multiplicity = 1;
    std::vector<Rank1Term> minimizers;
    int n_complex = 0;
    bool converged = true;
    int iterations = 0;
    std::string diagnostic;
};

struct HopmOptions {
    int max_iter = 5000;
    double tol = 1e-13;
    int restarts = 8;
    std::uint64_t seed = 0;
};

/// Alternating least squares on the three normal equations, best of several
/// deterministic restarts (dominant unfolding vectors first, then random).
BestRank1Result hopm(const TensorPxPx2& x, const HopmOptions& opt = {});

struct BestRank1Options {
    bool hopm_crosscheck = true;
    int crosscheck_restarts = 3;
};

/// Global best rank-1 approximation by stationary-point enumeration.
BestRank1Result best_rank1_222(const Tensor222& x, const BestRank1Options& opt = {});

BestRank1Result best_rank1_sym(const SymTensor222& xs);

/// Sufficient condition for infinitely many best rank-1 approximations:
/// every slab combination in modes 3 and 2 is orthogonal up to scale.
bool detect_infinite_best(const Tensor222& x, double tol = 1e-9);

/// Hessian of reduced_psi by central differences.
bool hessian_pd(const Tensor222& x, double y2, double z2);

} // namespace tensorbit
