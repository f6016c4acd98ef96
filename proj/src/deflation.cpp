#include "tensorbit/deflation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "tensorbit/errors.hpp"
#include "tensorbit/rng.hpp"

namespace tensorbit {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

std::optional<PencilReport> pencil_or_none(const Tensor222& x, double coincidence_tol) {
    if (max_abs(x) == 0.0)
        return std::nullopt;
    return pencil_eigs_auto(x, coincidence_tol);
}

void fill_222(DeflationReport& rep, const Tensor222& x, const Tensor222& z, const OrbitTolerances& tol) {
    rep.orbit_before = classify(x, tol);
    rep.orbit_after = classify(z, tol);
    rep.delta_before = hyperdet(x);
    rep.delta_after = hyperdet(z);
    rep.scale_before = std::pow(max_abs(x), 4);
    rep.scale_after = std::pow(max_abs(z), 4);
    rep.pencil_before = pencil_or_none(x, tol.coincidence_tol);
    rep.pencil_after = pencil_or_none(z, tol.coincidence_tol);
    rep.residual_mlrank = multilinear_rank(z, tol.rank_tol);
    rep.delta_after_in_band = std::abs(rep.delta_after) <= tol.delta_band * rep.scale_after;
    rep.coincidence_consistent = rep.orbit_after.orbit != Orbit::D3 ||
                                 (rep.pencil_after && rep.pencil_after->eig.is_double());
}

// X2 X1^-1 for a p x p x 2 tensor, or nothing when X1 is too ill-conditioned.
std::optional<Matrix> pencil_quotient(const TensorPxPx2& x) {
    const Matrix x1 = x.slab(0), x2 = x.slab(1);
    if (!(condition_number(x1) <= kSlabConditionCap))
        return std::nullopt;
    const int p = x.p();
    const Matrix x1t = x1.transposed();
    Matrix q(p, p);
    // Q X1 = X2 row by row: X1^T q_r = (row r of X2)^T.
    for (int r = 0; r < p; ++r) {
        Vector rhs(p);
        for (int j = 0; j < p; ++j)
            rhs[j] = x2(r, j);
        const Vector qr = solve(x1t, rhs);
        for (int j = 0; j < p; ++j)
            q(r, j) = qr[j];
    }
    return q;
}

[[noreturn]] void rethrow_with_context(const std::exception& e, const char* where) {
    if (const auto* ne = dynamic_cast<const NumericalError*>(&e))
        throw NumericalError(std::string(where) + ": " + ne->what(), ne->iterations());
    if (dynamic_cast<const std::invalid_argument*>(&e))
        throw std::invalid_argument(std::string(where) + ": " + e.what());
    if (dynamic_cast<const std::domain_error*>(&e))
        throw std::domain_error(std::string(where) + ": " + e.what());
    throw std::runtime_error(std::string(where) + ": " + e.what());
}

} // namespace

std::optional<Spectrum> pencil_spectrum(const TensorPxPx2& x, double coincidence_tol) {
    if (auto q = pencil_quotient(x))
        return spectrum_small(*q, coincidence_tol);
    return std::nullopt;
}

Deflated<Tensor222> deflate_once(const Tensor222& x, const OrbitTolerances& tol) {
    BestRank1Result b;
    try {
        b = best_rank1_222(x);
    } catch (const std::exception& e) {
        rethrow_with_context(e, "deflate_once");
    }
    Deflated<Tensor222> out;
    out.residual = x - b.term.evaluate222();
    DeflationReport& rep = out.report;
    fill_222(rep, x, out.residual, tol);
    rep.psi = b.psi;
    rep.ties = b.multiplicity;
    rep.term = b.term;
    rep.converged = b.converged;
    rep.iterations = b.iterations;
    rep.diagnostic = b.diagnostic;
    return out;
}

Deflated<SymTensor222> deflate_once(const SymTensor222& x, const OrbitTolerances& tol) {
    BestRank1Result b;
    try {
        b = best_rank1_sym(x);
    } catch (const std::exception& e) {
        rethrow_with_context(e, "deflate_once");
    }
    Deflated<SymTensor222> out;
    const double y1 = b.term.y[0], y2 = b.term.y[1];
    out.residual = {x.a - y1 * y1 * y1, x.b - y1 * y1 * y2, x.c - y1 * y2 * y2, x.d - y2 * y2 * y2};
    DeflationReport& rep = out.report;
    fill_222(rep, x.to_full(), out.residual.to_full(), tol);
    rep.psi = b.psi;
    rep.ties = b.multiplicity;
    rep.term = b.term;
    rep.diagnostic = b.diagnostic;
    return out;
}

Deflated<TensorPxPx2> deflate_once(const TensorPxPx2& x, const HopmOptions& hopm_opt,
                                   const OrbitTolerances& tol) {
    BestRank1Result b;
    try {
        b = hopm(x, hopm_opt);
    } catch (const std::exception& e) {
        rethrow_with_context(e, "deflate_once");
    }
    Deflated<TensorPxPx2> out;
    out.residual = x - b.term.evaluate();
    DeflationReport& rep = out.report;
    if (x.p() == 2) {
        fill_222(rep, x.to_222(), out.residual.to_222(), tol);
    } else {
        rep.residual_mlrank = multilinear_rank(out.residual, tol.rank_tol);
        rep.scale_before = std::pow(max_abs(x), 4);
        rep.scale_after = std::pow(max_abs(out.residual), 4);
    }
    rep.spectrum_before = pencil_spectrum(x, tol.coincidence_tol);
    rep.spectrum_after = pencil_spectrum(out.residual, tol.coincidence_tol);
    rep.psi = b.psi;
    rep.term = b.term;
    rep.converged = b.converged;
    rep.iterations = b.iterations;
    rep.diagnostic = b.diagnostic;
    return out;
}

DeflationReport check_degenerate_props(const Tensor222& x, double tol) {
    const OrbitLabel lab = classify(x, tol);
    const double sc = max_abs(x);
    const bool diagonal = std::abs(x.b()) <= tol * sc && std::abs(x.c()) <= tol * sc &&
                          std::abs(x.f()) <= tol * sc && std::abs(x.g()) <= tol * sc;
    Orbit expected;
    switch (lab.orbit) {
    case Orbit::D1: expected = Orbit::D0; break;
    case Orbit::D2:
    case Orbit::D2p:
    case Orbit::D2pp: expected = Orbit::D1; break;
    case Orbit::G2:
        if (diagonal) {
            expected = Orbit::D1;
            break;
        }
        [[fallthrough]];
    default:
        throw std::domain_error(std::string("check_degenerate_props: orbit ") + to_string(lab.orbit) +
                                " input is neither degenerate nor diagonal-slab rank 2");
    }
    OrbitTolerances ot;
    ot.delta_band = tol;
    ot.rank_tol = tol;
    Deflated<Tensor222> d = deflate_once(x, ot);
    DeflationReport rep = d.report;
    rep.expected_after = expected;
    rep.proposition_holds = rep.orbit_after.orbit == expected;

    if (diagonal) {
        const double a = x.a(), dd = x.d(), e = x.e(), h = x.h();
        const double nx2 = frobenius_norm_sq(x);
        std::vector<Tensor222> cands = {Tensor222({a, 0, 0, 0, e, 0, 0, 0}),
                                        Tensor222({0, 0, 0, dd, 0, 0, 0, h})};
        const double n1 = std::hypot(a, e), n2 = std::hypot(dd, h);
        if (std::abs(a * h - dd * e) <= tol * nx2 && std::max(n1, n2) > 0.0) {
            // Proportional slabs: X = diag(s1, s2) (x) w; with |s1| = |s2| every
            // unit u gives the optimum diag(s1, s2) u u^T (x) w.
            const double w1 = n1 >= n2 ? a / n1 : dd / n2;
            const double w2 = n1 >= n2 ? e / n1 : h / n2;
            const double s1 = a * w1 + e * w2, s2 = dd * w1 + h * w2;
            Tensor222 y3;
            for (int k = 0; k < 2; ++k) {
                const double wk = k == 0 ? w1 : w2;
                y3(0, 0, k) = 0.5 * wk * s1;
                y3(0, 1, k) = 0.5 * wk * s1;
                y3(1, 0, k) = 0.5 * wk * s2;
                y3(1, 1, k) = 0.5 * wk * s2;
            }
            cands.push_back(y3);
        }
        double best = std::numeric_limits<double>::infinity();
        std::vector<double> vals;
        for (const Tensor222& y : cands) {
            vals.push_back(frobenius_norm_sq(x - y));
            best = std::min(best, vals.back());
        }
        int ties = 0;
        for (double v : vals)
            ties += v <= best + 1e-9 * nx2;
        rep.ties = std::max(rep.ties, ties);
        rep.infinite_ties = cands.size() == 3 && ties == 3;
        if (std::abs(best - rep.psi) > 1e-8 * nx2) {
            rep.proposition_holds = false;
            rep.diagnostic += std::string(rep.diagnostic.empty() ? "" : "; ") +
                              "closed-form diagonal candidates disagree with the computed optimum";
        }
    }
    return rep;
}

namespace {

unsigned worker_count(unsigned requested, std::size_t n) {
    unsigned t = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(t, std::max<std::size_t>(n, 1)));
}

// Runs body(i, record) for every trial; records land at their trial index so
// the result does not depend on scheduling.
template <class Body>
std::vector<TrialRecord> run_trials(std::size_t n, std::uint64_t seed, unsigned threads, Body body) {
    std::vector<TrialRecord> recs(n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n)
                return;
            TrialRecord& r = recs[i];
            r.trial = i;
            r.seed = stream_seed(seed, i);
            try {
                body(i, r);
            } catch (const std::exception& e) {
                r.failed = true;
                r.failure = e.what();
                r.outcome = "failed";
            }
        }
    };
    const unsigned nt = worker_count(threads, n);
    if (nt <= 1) {
        work();
        return recs;
    }
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nt; ++t)
        pool.emplace_back(work);
    for (auto& t : pool)
        t.join();
    return recs;
}

void record_222(TrialRecord& r, const DeflationReport& rep) {
    r.orbit_before = to_string(rep.orbit_before.orbit);
    r.orbit_after = to_string(rep.orbit_after.orbit);
    r.outcome = r.orbit_after;
    r.delta_before = rep.scale_before > 0.0 ? rep.delta_before / rep.scale_before : 0.0;
    r.delta_after = rep.scale_after > 0.0 ? rep.delta_after / rep.scale_after : 0.0;
    r.psi = rep.psi;
    r.eigen_gap = rep.pencil_after ? rep.pencil_after->eig.relative_gap : kNaN;
    r.x_eigen_gap = rep.pencil_before ? rep.pencil_before->eig.relative_gap : kNaN;
    r.mlrank = rep.residual_mlrank;
    r.converged = rep.converged;
}

std::vector<double> normals(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v)
        x = nd(rng);
    return v;
}

Matrix random_transform(std::mt19937_64& rng) {
    for (;;) {
        const auto v = normals(rng, 4);
        const Matrix s{{v[0], v[1]}, {v[2], v[3]}};
        if (condition_number(s) <= 1e3)
            return s;
    }
}

bool is_222(const MultilinearRank& r) { return r.r1 == 2 && r.r2 == 2 && r.r3 == 2; }

ExperimentStats aggregate(std::string kind, std::uint64_t seed, int p, const ExperimentTolerances& tol,
                          std::vector<TrialRecord> recs) {
    ExperimentStats s;
    s.kind = std::move(kind);
    s.trials = recs.size();
    s.seed = seed;
    s.p = p;
    s.tol = tol;
    std::vector<std::string> labels;
    if (p == 2) {
        for (Orbit o : {Orbit::D0, Orbit::D1, Orbit::D2, Orbit::D2p, Orbit::D2pp, Orbit::G2, Orbit::D3,
                        Orbit::G3})
            labels.push_back(to_string(o));
    } else {
        labels = {"one_coincident_pair", "no_coincident_pair", "several_coincident_pairs",
                  "singular_slab", "not_converged"};
    }
    labels.push_back("failed");
    for (const auto& l : labels)
        s.counts.emplace_back(l, 0);
    for (int k = -16; k <= 0; ++k)
        s.eigen_gap_histogram.emplace_back(std::pow(10.0, k), 0);
    s.eigen_gap_histogram.emplace_back(std::numeric_limits<double>::infinity(), 0);

    std::size_t n_d3 = 0;
    for (const TrialRecord& r : recs) {
        for (auto& [label, count] : s.counts)
            if (label == r.outcome)
                ++count;
        if (r.failed) {
            ++s.failures;
            s.failure_reasons.push_back("trial " + std::to_string(r.trial) + ": " + r.failure);
            continue;
        }
        if (!r.converged) {
            ++s.failures;
            s.failure_reasons.push_back("trial " + std::to_string(r.trial) + ": hopm did not converge");
        }
        if (p == 2) {
            n_d3 += r.orbit_after == to_string(Orbit::D3);
            s.n_delta_in_band += std::abs(r.delta_after) <= tol.delta_band;
            s.max_abs_delta_after = std::max(s.max_abs_delta_after, std::abs(r.delta_after));
            s.n_mlrank_222 += is_222(r.mlrank);
        }
        if (std::isfinite(r.eigen_gap)) {
            s.n_z_gap_small += r.eigen_gap <= tol.coincidence_tol;
            for (auto& [edge, count] : s.eigen_gap_histogram)
                if (r.eigen_gap <= edge) {
                    ++count;
                    break;
                }
        }
        if (std::isfinite(r.x_eigen_gap))
            s.n_x_gap_large += r.x_eigen_gap > tol.x_gap_threshold;
        if (r.converged) {
            ++s.n_converged;
            s.n_one_coincident_pair += r.coincident_pairs_after == 1;
            s.n_single_eigenvector += r.coincident_pairs_after == 1 && r.coincident_eigenvectors == 1;
            s.n_conjecture_consistent += r.conjecture_consistent;
            if (r.complex_pairs_before > 0) {
                ++s.n_complex_before;
                s.n_complex_decrement += r.complex_pairs_after == r.complex_pairs_before - 1;
            }
        }
    }
    s.fraction_d3 = s.trials ? static_cast<double>(n_d3) / static_cast<double>(s.trials) : 0.0;
    auto frac = [](std::size_t a, std::size_t b) {
        return b ? static_cast<double>(a) / static_cast<double>(b) : 0.0;
    };
    s.fraction_one_coincident_pair = frac(s.n_one_coincident_pair, s.n_converged);
    s.fraction_complex_decrement = frac(s.n_complex_decrement, s.n_complex_before);
    s.fraction_consistent = frac(s.n_conjecture_consistent, s.n_converged);
    s.records = std::move(recs);
    return s;
}

void require_trials(std::size_t trials, const char* where) {
    if (trials < 1)
        throw std::invalid_argument(std::string(where) + ": trials must be at least 1");
}

// Smallest relative distance between two eigenvalues; a conjugate pair with a
// tiny imaginary part counts through 2|imag|.
double closest_pair_gap(const Spectrum& sp) {
    double best = std::numeric_limits<double>::infinity();
    const auto& ev = sp.eigenvalues;
    for (std::size_t i = 0; i < ev.size(); ++i)
        for (std::size_t j = i + 1; j < ev.size(); ++j)
            best = std::min(best, std::abs(ev[i] - ev[j]) /
                                      (1.0 + std::max(std::abs(ev[i]), std::abs(ev[j]))));
    return best;
}

// Residual pencil outcome for p x p x 2 trials, from the spectra.
void record_spectra(TrialRecord& r, const DeflationReport& rep) {
    r.converged = rep.converged;
    r.psi = rep.psi;
    r.mlrank = rep.residual_mlrank;
    if (!rep.spectrum_before || !rep.spectrum_after) {
        r.outcome = "singular_slab";
        r.conjecture_consistent = false;
        return;
    }
    const Spectrum& sb = *rep.spectrum_before;
    const Spectrum& sa = *rep.spectrum_after;
    r.complex_pairs_before = sb.n_complex_pairs;
    r.complex_pairs_after = sa.n_complex_pairs;
    r.coincident_pairs_after = sa.n_coincident_real_pairs;
    r.coincident_eigenvectors = sa.coincident_eigenvector_counts.empty() ? 0 : sa.coincident_eigenvector_counts.front();
    r.eigen_gap = closest_pair_gap(sa);
    r.x_eigen_gap = closest_pair_gap(sb);
    if (!rep.converged)
        r.outcome = "not_converged";
    else if (sa.n_coincident_real_pairs == 1)
        r.outcome = "one_coincident_pair";
    else if (sa.n_coincident_real_pairs == 0)
        r.outcome = "no_coincident_pair";
    else
        r.outcome = "several_coincident_pairs";
    r.conjecture_consistent = rep.converged && sa.n_coincident_real_pairs == 1 &&
                              sa.n_complex_pairs == std::max(0, sb.n_complex_pairs - 1);
}

} // namespace

ExperimentStats experiment_generic(std::size_t trials, std::uint64_t seed, const ExperimentTolerances& tol) {
    require_trials(trials, "experiment_generic");
    auto recs = run_trials(trials, seed, tol.threads, [&](std::size_t i, TrialRecord& r) {
        auto rng = stream_rng(seed, i);
        const Tensor222 x = Tensor222::from_span(normals(rng, 8));
        record_222(r, deflate_once(x, tol.orbit()).report);
    });
    return aggregate("generic", seed, 2, tol, std::move(recs));
}

ExperimentStats experiment_symmetric(std::size_t trials, std::uint64_t seed, const ExperimentTolerances& tol) {
    require_trials(trials, "experiment_symmetric");
    auto recs = run_trials(trials, seed, tol.threads, [&](std::size_t i, TrialRecord& r) {
        auto rng = stream_rng(seed, i);
        const auto v = normals(rng, 4);
        record_222(r, deflate_once(SymTensor222{v[0], v[1], v[2], v[3]}, tol.orbit()).report);
    });
    return aggregate("symmetric", seed, 2, tol, std::move(recs));
}

ExperimentStats experiment_d3_closure(std::size_t trials, std::uint64_t seed, const ExperimentTolerances& tol) {
    require_trials(trials, "experiment_d3_closure");
    const Tensor222 d3 = canonical_tensor(Orbit::D3);
    auto recs = run_trials(trials, seed, tol.threads, [&](std::size_t i, TrialRecord& r) {
        auto rng = stream_rng(seed, i);
        const Matrix s1 = random_transform(rng), s2 = random_transform(rng), s3 = random_transform(rng);
        record_222(r, deflate_once(multilinear_transform(d3, s1, s2, s3), tol.orbit()).report);
    });
    return aggregate("d3", seed, 2, tol, std::move(recs));
}

ExperimentStats experiment_pxpx2(int p, std::size_t trials, std::uint64_t seed, const ExperimentTolerances& tol) {
    if (p < 2 || p > 8)
        throw std::invalid_argument("experiment_pxpx2: p must be between 2 and 8");
    require_trials(trials, "experiment_pxpx2");
    const std::size_t n = static_cast<std::size_t>(2 * p * p);
    auto recs = run_trials(trials, seed, tol.threads, [&](std::size_t i, TrialRecord& r) {
        auto rng = stream_rng(seed, i);
        const TensorPxPx2 x(p, normals(rng, n));
        HopmOptions ho;
        ho.seed = r.seed;
        const auto d = deflate_once(x, ho, tol.orbit());
        record_spectra(r, d.report);
        if (p == 2)
            record_222(r, d.report);
    });
    return aggregate("pxp2", seed, p, tol, std::move(recs));
}

ExperimentStats experiment_on(const std::vector<Tensor222>& inputs, const ExperimentTolerances& tol) {
    require_trials(inputs.size(), "experiment_on");
    auto recs = run_trials(inputs.size(), 0, tol.threads, [&](std::size_t i, TrialRecord& r) {
        record_222(r, deflate_once(inputs[i], tol.orbit()).report);
    });
    return aggregate("generic", 0, 2, tol, std::move(recs));
}

ExperimentStats experiment_on(const std::vector<SymTensor222>& inputs, const ExperimentTolerances& tol) {
    require_trials(inputs.size(), "experiment_on");
    auto recs = run_trials(inputs.size(), 0, tol.threads, [&](std::size_t i, TrialRecord& r) {
        record_222(r, deflate_once(inputs[i], tol.orbit()).report);
    });
    return aggregate("symmetric", 0, 2, tol, std::move(recs));
}

std::string mlrank_string(const MultilinearRank& r) {
    return std::to_string(r.r1) + "x" + std::to_string(r.r2) + "x" + std::to_string(r.r3);
}

using nlohmann::ordered_json;

ordered_json to_json(const PencilReport& r) {
    ordered_json j;
    j["order"] = to_string(r.order);
    j["quotient"] = {{r.quotient(0, 0), r.quotient(0, 1)}, {r.quotient(1, 0), r.quotient(1, 1)}};
    j["kind"] = to_string(r.eig.kind);
    j["values"] = {r.eig.values[0], r.eig.values[1]};
    j["eigenvector_count"] = r.eig.eigenvector_count;
    j["relative_gap"] = r.eig.relative_gap;
    return j;
}

ordered_json to_json(const Spectrum& s) {
    ordered_json j;
    ordered_json ev = ordered_json::array();
    for (const Complex& z : s.eigenvalues)
        ev.push_back({z.real(), z.imag()});
    j["eigenvalues"] = ev;
    j["n_complex_pairs"] = s.n_complex_pairs;
    j["n_coincident_real_pairs"] = s.n_coincident_real_pairs;
    j["coincident_eigenvector_counts"] = s.coincident_eigenvector_counts;
    j["min_real_gap"] = s.min_real_gap;
    return j;
}

ordered_json to_json(const DeflationReport& r) {
    ordered_json j;
    j["orbit_before"] = to_string(r.orbit_before.orbit);
    j["orbit_after"] = to_string(r.orbit_after.orbit);
    j["boundary_margin_before"] = r.orbit_before.boundary_margin;
    j["boundary_margin_after"] = r.orbit_after.boundary_margin;
    j["delta_before"] = r.delta_before;
    j["delta_after"] = r.delta_after;
    j["scale_before"] = r.scale_before;
    j["scale_after"] = r.scale_after;
    j["pencil_before"] = r.pencil_before ? to_json(*r.pencil_before) : ordered_json(nullptr);
    j["pencil_after"] = r.pencil_after ? to_json(*r.pencil_after) : ordered_json(nullptr);
    if (r.spectrum_before || r.spectrum_after) {
        j["spectrum_before"] = r.spectrum_before ? to_json(*r.spectrum_before) : ordered_json(nullptr);
        j["spectrum_after"] = r.spectrum_after ? to_json(*r.spectrum_after) : ordered_json(nullptr);
    }
    j["residual_mlrank"] = {r.residual_mlrank.r1, r.residual_mlrank.r2, r.residual_mlrank.r3};
    j["psi"] = r.psi;
    j["ties"] = r.ties;
    j["infinite_ties"] = r.infinite_ties;
    j["term"] = {{"x", r.term.x}, {"y", r.term.y}, {"z", r.term.z}};
    j["converged"] = r.converged;
    j["delta_after_in_band"] = r.delta_after_in_band;
    j["coincidence_consistent"] = r.coincidence_consistent;
    if (r.expected_after) {
        j["expected_after"] = to_string(*r.expected_after);
        j["proposition_holds"] = r.proposition_holds;
    }
    j["diagnostic"] = r.diagnostic;
    return j;
}

ordered_json to_json(const ExperimentStats& s) {
    ordered_json j;
    j["kind"] = s.kind;
    j["trials"] = s.trials;
    j["seed"] = s.seed;
    j["p"] = s.p;
    j["tolerances"] = {{"delta_band", s.tol.delta_band},
                       {"rank_tol", s.tol.rank_tol},
                       {"coincidence_tol", s.tol.coincidence_tol},
                       {"x_gap_threshold", s.tol.x_gap_threshold}};
    ordered_json counts = ordered_json::object();
    for (const auto& [label, n] : s.counts)
        counts[label] = n;
    j["counts"] = counts;
    j["fraction_d3"] = s.fraction_d3;
    j["max_abs_delta_after"] = s.max_abs_delta_after;
    j["n_delta_in_band"] = s.n_delta_in_band;
    j["n_mlrank_222"] = s.n_mlrank_222;
    j["n_z_gap_small"] = s.n_z_gap_small;
    j["n_x_gap_large"] = s.n_x_gap_large;
    ordered_json hist = ordered_json::array();
    for (const auto& [edge, n] : s.eigen_gap_histogram)
        hist.push_back({{"upper", std::isfinite(edge) ? ordered_json(edge) : ordered_json("inf")}, {"count", n}});
    j["eigen_gap_histogram"] = hist;
    j["failures"] = s.failures;
    j["failure_reasons"] = s.failure_reasons;
    if (s.kind == "pxp2") {
        j["n_converged"] = s.n_converged;
        j["n_one_coincident_pair"] = s.n_one_coincident_pair;
        j["n_single_eigenvector"] = s.n_single_eigenvector;
        j["n_complex_before"] = s.n_complex_before;
        j["n_complex_decrement"] = s.n_complex_decrement;
        j["n_conjecture_consistent"] = s.n_conjecture_consistent;
        j["fraction_one_coincident_pair"] = s.fraction_one_coincident_pair;
        j["fraction_complex_decrement"] = s.fraction_complex_decrement;
        j["fraction_consistent"] = s.fraction_consistent;
    }
    return j;
}

void write_csv(const ExperimentStats& s, std::ostream& os) {
    os << "trial,seed,orbit_before,orbit_after,delta_before,delta_after,psi,eigen_gap,mlrank\n";
    const auto old = os.precision(17);
    for (const TrialRecord& r : s.records) {
        os << r.trial << ',' << r.seed << ',' << r.orbit_before << ','
           << (r.failed ? std::string("failed") : (r.orbit_after.empty() ? r.outcome : r.orbit_after)) << ','
           << r.delta_before << ',' << r.delta_after << ',' << r.psi << ',' << r.eigen_gap << ','
           << mlrank_string(r.mlrank) << '\n';
    }
    os.precision(old);
}

} // namespace tensorbit
