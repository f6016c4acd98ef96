#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "tensorbit/orbits.hpp"

namespace tensorbit {

/// X = sum_r a_r (x) a_r (x) a_r.
struct SymDecomposition {
    int rank = 0;
    std::vector<Vector> vectors;
    double reconstruction_error = 0.0; // max entry deviation
    /// Rank-2 only: the two linear relations the pencil eigenvalues satisfy.
    std::array<double, 2> pencil_relation_residuals{0.0, 0.0};
};

SymTensor222 reconstruct(const SymDecomposition& dec);

struct SylvesterResult {
    int rank = 0;
    std::array<double, 3> g{0.0, 0.0, 0.0}; // (ac - b^2, bc - ad, bd - c^2)
    double discriminant = 0.0;             // g1^2 - 4 g0 g2, equals the hyperdeterminant
    std::optional<SymDecomposition> decomposition;
};

SylvesterResult sylvester_rank(const SymTensor222& xs, double tol = 1e-9);

SymDecomposition sym_rank2_decompose(const SymTensor222& xs, double tol = 1e-9);
SymDecomposition sym_rank3_decompose(const SymTensor222& xs, double tol = 1e-9);

/// Diagonal rescaling to the form (a, 1, 1, d).
struct NormalizedSymForm {
    bool ok = false;          // false when b or c vanishes
    std::string branch;       // "normalized", "b_zero" or "c_zero"
    double a = 0.0;
    double d = 0.0;
    Matrix s_pre;             // (S,S,S) . X = (a, 1, 1, d)
};

NormalizedSymForm canonicalize_sym_form(const SymTensor222& xs, double tol = 1e-12);

struct CanonicalTransform {
    Matrix s;
    Orbit orbit = Orbit::D3;
    double residual = 0.0; // Frobenius norm of (S,S,S) . Y_canon - X
};

/// Symmetric canonical representatives (0,1,0,0) and (-1,0,1,0).
SymTensor222 sym_canonical(Orbit o);

SymTensor222 sym_transform(const SymTensor222& xs, const Matrix& s);

/// S with (S,S,S) . (0,1,0,0) = (a,1,1,d); requires |Delta| <= boundary_tol * scale.
CanonicalTransform transform_from_canonical_D3(double a, double d, double boundary_tol = 1e-6);

/// S with (S,S,S) . (-1,0,1,0) = (a,1,1,d); requires Delta < 0.
CanonicalTransform transform_from_canonical_G3(double a, double d);

/// Either transform for a general symmetric tensor in orbit D3 or G3, composed
/// with the diagonal normalization.
CanonicalTransform transform_from_canonical(const SymTensor222& xs, double boundary_tol = 1e-6);

} // namespace tensorbit
