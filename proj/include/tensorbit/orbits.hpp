#pragma once

#include <optional>
#include <string_view>

#include "tensorbit/smallalg.hpp"
#include "tensorbit/tensor.hpp"

namespace tensorbit {

/// Orbits of real 2x2x2 tensors under invertible multilinear transforms.
/// D2p and D2pp are the primed variants D2' and D2''.
enum class Orbit { D0, D1, D2, D2p, D2pp, G2, D3, G3 };

const char* to_string(Orbit o);
std::optional<Orbit> orbit_from_string(std::string_view s);

/// Tensor rank of every member of the orbit.
int orbit_rank(Orbit o);

struct OrbitLabel {
    Orbit orbit = Orbit::D0;
    /// Distance of the deciding statistic from its threshold; small values
    /// mean the label is close to flipping.
    double boundary_margin = 0.0;
};

/// Symmetric 2x2x2 tensor with X1 = [a b; b c], X2 = [b c; c d].
struct SymTensor222 {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;

    Tensor222 to_full() const;
    double max_abs() const;
    /// Extracts (a,b,c,d) when X is symmetric to within tol * max|X|.
    static std::optional<SymTensor222> from_full(const Tensor222& x, double tol = 1e-12);
    bool operator==(const SymTensor222&) const = default;
};

/// Canonical representative from the orbit table.
Tensor222 canonical_tensor(Orbit o);

double hyperdet(const Tensor222& x);
double hyperdet(const SymTensor222& x);

struct OrbitTolerances {
    double delta_band = 1e-9;     // |Delta| <= band * max|x|^4 counts as zero
    double rank_tol = 1e-9;       // unfolding rank threshold, relative to sigma_max
    double coincidence_tol = 1e-6; // eigenvalue coincidence for pencil reports
};

OrbitLabel classify(const Tensor222& x, double tol = 1e-9);
OrbitLabel classify(const Tensor222& x, const OrbitTolerances& tol);

OrbitLabel classify_sym(const SymTensor222& x, double tol = 1e-9);

enum class SlabOrder { X2X1inv, X1X2inv };
const char* to_string(SlabOrder o);

/// Slabs with condition number above this are refused as the inverted slab.
inline constexpr double kSlabConditionCap = 1e8;

/// X2 X1^-1 or X1 X2^-1. Throws SingularSlabError when the inverted slab is
/// too ill-conditioned; the other order may still work.
Matrix pencil_matrix(const Tensor222& x, SlabOrder order);
EigenPair2 pencil_eigs(const Tensor222& x, SlabOrder order, double coincidence_tol = 1e-6);

struct PencilReport {
    SlabOrder order = SlabOrder::X2X1inv;
    Matrix quotient;
    EigenPair2 eig;
};

/// X2 X1^-1 unless X1 is ill-conditioned, then X1 X2^-1; nothing when both are.
std::optional<PencilReport> pencil_eigs_auto(const Tensor222& x, double coincidence_tol = 1e-6);

struct OrbitReport {
    OrbitLabel label;
    double delta = 0.0;
    double scale = 0.0; // max|x|^4
    MultilinearRank mlrank;
    std::optional<PencilReport> pencil;
    /// True when the label is D3 and the pencil shows a defective double
    /// eigenvalue; false for D3 labels the pencil could not confirm.
    bool d3_confirmed = false;
};

OrbitReport analyze(const Tensor222& x, const OrbitTolerances& tol = {});

} // namespace tensorbit
