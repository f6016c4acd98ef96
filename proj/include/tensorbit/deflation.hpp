#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "tensorbit/orbits.hpp"
#include "tensorbit/rank1.hpp"

namespace tensorbit {

struct DeflationReport {
    OrbitLabel orbit_before;
    OrbitLabel orbit_after;
    double delta_before = 0.0;
    double delta_after = 0.0;
    double scale_before = 0.0; // max|X|^4
    double scale_after = 0.0;  // max|X - Y|^4
    /// Pencil of the 2x2x2 tensor before and after (absent when both slabs
    /// are singular or the tensor vanishes).
    std::optional<PencilReport> pencil_before;
    std::optional<PencilReport> pencil_after;
    /// Spectra of X2 X1^-1 for p x p x 2 inputs with p > 2.
    std::optional<Spectrum> spectrum_before;
    std::optional<Spectrum> spectrum_after;
    MultilinearRank residual_mlrank;
    double psi = 0.0;
    int ties = 1;
    bool infinite_ties = false;
    Rank1Term term;
    bool converged = true; // hopm route only
    int iterations = 0;
    /// |delta_after| within the Delta band; the pencil then must show a
    /// coincident eigenvalue pair for the D3 label to be consistent.
    bool delta_after_in_band = false;
    bool coincidence_consistent = false;
    /// Filled by check_degenerate_props.
    std::optional<Orbit> expected_after;
    bool proposition_holds = false;
    std::string diagnostic;
};

template <class T>
struct Deflated {
    T residual;
    DeflationReport report;
};

Deflated<Tensor222> deflate_once(const Tensor222& x, const OrbitTolerances& tol = {});
Deflated<SymTensor222> deflate_once(const SymTensor222& x, const OrbitTolerances& tol = {});
Deflated<TensorPxPx2> deflate_once(const TensorPxPx2& x, const HopmOptions& hopm_opt,
                                   const OrbitTolerances& tol = {});

/// Spectrum of X2 X1^-1, or nothing when X1 is numerically singular.
std::optional<Spectrum> pencil_spectrum(const TensorPxPx2& x, double coincidence_tol = 1e-6);

/// Verifies the residual orbit for inputs with a known deflation outcome:
/// D1 goes to D0, the D2 family and rank-2 diagonal slabs go to D1.
/// Throws std::domain_error for other inputs.
DeflationReport check_degenerate_props(const Tensor222& x, double tol = 1e-9);

struct ExperimentTolerances {
    double delta_band = 1e-6;      // relative to max|X|^4
    double rank_tol = 1e-9;
    double coincidence_tol = 1e-4; // relative eigenvalue gap
    double x_gap_threshold = 1e-2; // "well separated" for the input pencil
    unsigned threads = 0;          // 0 picks hardware concurrency

    OrbitTolerances orbit() const { return {delta_band, rank_tol, coincidence_tol}; }
};

struct TrialRecord {
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    std::string outcome; // orbit name, or the pencil outcome for p > 2
    std::string orbit_before;
    std::string orbit_after;
    double delta_before = 0.0;
    double delta_after = 0.0; // relative to max|Z|^4
    double psi = 0.0;
    double eigen_gap = 0.0;   // relative gap of the residual pencil
    double x_eigen_gap = 0.0; // same for the input pencil
    MultilinearRank mlrank;
    bool failed = false;
    std::string failure;
    // p x p x 2 only.
    bool converged = true;
    int complex_pairs_before = 0;
    int complex_pairs_after = 0;
    int coincident_pairs_after = 0;
    int coincident_eigenvectors = 0;
    bool conjecture_consistent = false;
};

struct ExperimentStats {
    std::string kind;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    int p = 2;
    ExperimentTolerances tol;
    /// Outcome label and count, in a fixed order; counts sum to trials.
    std::vector<std::pair<std::string, std::size_t>> counts;
    double fraction_d3 = 0.0;
    double max_abs_delta_after = 0.0; // relative, over non-failed trials
    std::size_t n_delta_in_band = 0;
    std::size_t n_mlrank_222 = 0;
    std::size_t n_z_gap_small = 0;
    std::size_t n_x_gap_large = 0;
    /// Decade buckets of the residual eigenvalue gap: (upper edge, count).
    std::vector<std::pair<double, std::size_t>> eigen_gap_histogram;
    std::size_t failures = 0;
    std::vector<std::string> failure_reasons; // "trial N: reason"
    // p x p x 2 only.
    std::size_t n_converged = 0;
    std::size_t n_one_coincident_pair = 0;
    std::size_t n_single_eigenvector = 0;
    std::size_t n_complex_before = 0;          // trials with a complex pair in X
    std::size_t n_complex_decrement = 0;       // of those, Z shows one fewer pair
    std::size_t n_conjecture_consistent = 0;   // among converged trials
    double fraction_one_coincident_pair = 0.0; // among converged trials
    double fraction_complex_decrement = 0.0;   // among trials with complex pairs
    double fraction_consistent = 0.0;          // among converged trials
    std::vector<TrialRecord> records;
};

/// Random tensors with i.i.d. standard normal entries, deflated and classified.
ExperimentStats experiment_generic(std::size_t trials, std::uint64_t seed,
                                   const ExperimentTolerances& tol = {});
ExperimentStats experiment_symmetric(std::size_t trials, std::uint64_t seed,
                                     const ExperimentTolerances& tol = {});
/// Random invertible transforms (condition number at most 1e3) of the
/// canonical D3 tensor.
ExperimentStats experiment_d3_closure(std::size_t trials, std::uint64_t seed,
                                      const ExperimentTolerances& tol = {});
ExperimentStats experiment_pxpx2(int p, std::size_t trials, std::uint64_t seed,
                                 const ExperimentTolerances& tol = {});

/// Same statistics for caller-supplied tensors (trial i uses inputs[i]).
ExperimentStats experiment_on(const std::vector<Tensor222>& inputs, const ExperimentTolerances& tol = {});
ExperimentStats experiment_on(const std::vector<SymTensor222>& inputs,
                              const ExperimentTolerances& tol = {});

std::string mlrank_string(const MultilinearRank& r);

nlohmann::ordered_json to_json(const ExperimentStats& s);
nlohmann::ordered_json to_json(const DeflationReport& r);
nlohmann::ordered_json to_json(const PencilReport& r);
nlohmann::ordered_json to_json(const Spectrum& s);

/// Per-trial CSV: trial, seed, orbit_before, orbit_after, delta_before,
/// delta_after, psi, eigen_gap, mlrank.
void write_csv(const ExperimentStats& s, std::ostream& os);

} // namespace tensorbit
