// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 when any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "oracles.hpp"
#include "tensorbit/cli.hpp"
#include "tensorbit/decomp.hpp"
#include "tensorbit/deflation.hpp"
#include "tensorbit/rank1.hpp"

using namespace tensorbit;
using nlohmann::json;

namespace {

const Tensor222 kEx1({-0.4326, 0.1253, -1.6656, 0.2877, -1.1465, 1.1892, 1.1909, -0.0376});
const Tensor222 kEx2({-1.6041, -1.0565, 0.2573, 1.4151, 0.8156, 1.2902, 0.7119, 0.6686});
const std::string kEx1Csv = "-0.4326,0.1253,-1.6656,0.2877,-1.1465,1.1892,1.1909,-0.0376";
const std::string kEx2Csv = "-1.6041,-1.0565,0.2573,1.4151,0.8156,1.2902,0.7119,0.6686";
constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            notes.push_back(what);
        }
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json run_cli_json(const std::vector<std::string>& args, int& code) {
    std::vector<const char*> argv{"tensorbit"};
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return code == 0 ? json::parse(out.str()) : json();
}

struct TableRow {
    double y2, z2, psi;
    bool pd;
    bool degenerate;
};

void check_table(Outcome& o, const json& points, const std::vector<TableRow>& rows, double delta_x) {
    o.require(points.size() == rows.size(),
              "expected " + std::to_string(rows.size()) + " rows, got " + std::to_string(points.size()));
    for (const TableRow& r : rows) {
        const json* best = nullptr;
        double dist = 1e300;
        for (const json& p : points) {
            const double dd = std::abs(p["y2"].get<double>() - r.y2) + std::abs(p["z2"].get<double>() - r.z2);
            if (dd < dist) {
                dist = dd;
                best = &p;
            }
        }
        const std::string tag = "row (" + fmt("%.6g", r.y2) + ", " + fmt("%.6g", r.z2) + ")";
        if (!best) {
            o.require(false, tag + " missing");
            continue;
        }
        const json& p = *best;
        const double y2 = p["y2"].get<double>(), z2 = p["z2"].get<double>(), psi = p["psi"].get<double>();
        const double dres = p["delta_residual"].get<double>();
        o.require(std::abs(y2 - r.y2) <= 5e-4 && std::abs(z2 - r.z2) <= 5e-4,
                  tag + ": got (" + fmt("%.6f", y2) + ", " + fmt("%.6f", z2) + ")");
        o.require(std::abs(psi - r.psi) <= 5e-5,
                  tag + ": psi " + fmt("%.6f", psi) + " vs " + fmt("%.4f", r.psi) + " (|diff| " +
                      fmt("%.2e", std::abs(psi - r.psi)) + " > 5e-5)");
        if (r.degenerate)
            o.require(std::abs(dres - delta_x) <= 5e-4, tag + ": Delta(X-Y) " + fmt("%.6f", dres));
        else
            o.require(std::abs(dres) <= 1e-9, tag + ": |Delta(X-Y)| " + fmt("%.2e", std::abs(dres)));
        o.require(p["hessian_pd"].get<bool>() == r.pd, tag + ": Hessian-PD flag");
        o.require(p["degenerate"].get<bool>() == r.degenerate, tag + ": degenerate flag");
    }
}

Outcome criterion1() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    int code = 0;
    const json j = run_cli_json({"rank1", "--data", kEx1Csv, "--method", "enumerate"}, code);
    const double dt = seconds_since(t0);
    o.require(code == 0, "rank1 exit code " + std::to_string(code));
    if (code != 0)
        return o;
    check_table(o, j["points"],
                {{-0.592958, 0.621735, 5.1164, false, false},
                 {-0.229249, -1.08855, 2.6863, true, false},
                 {2.22613, 0.452035, 7.1313, false, false},
                 {2.42488, -2.88759, 6.5289, false, false},
                 {1.17156, 1.15843, 7.2081, false, true},
                 {5.96728, -0.05296, 7.2081, false, true}},
                2.7668);
    o.require(dt < 0.1, "runtime " + fmt("%.3f", dt) + " s");
    o.notes.push_back("runtime " + fmt("%.4f", dt) + " s");
    return o;
}

Outcome criterion2() {
    Outcome o;
    int code = 0;
    const json j = run_cli_json({"rank1", "--data", kEx2Csv, "--method", "enumerate"}, code);
    o.require(code == 0, "rank1 exit code");
    if (code != 0)
        return o;
    const json& pts = j["points"];
    o.require(pts.size() == 4, "expected 4 rows, got " + std::to_string(pts.size()));
    for (const json& p : pts)
        o.require(std::abs(p["delta_residual"].get<double>()) <= 1e-9, "|Delta(X-Y)| above 1e-9");
    const json& g = pts[0];
    const double y2 = g["y2"].get<double>(), z2 = g["z2"].get<double>(), psi = g["psi"].get<double>();
    o.require(std::abs(y2 - 0.995675) <= 5e-4 && std::abs(z2 + 0.598339) <= 5e-4,
              "global row at (" + fmt("%.6f", y2) + ", " + fmt("%.6f", z2) + ")");
    o.require(std::abs(psi - 3.1185) <= 5e-5, "global psi " + fmt("%.6f", psi));
    o.require(g["hessian_pd"].get<bool>(), "global row not PD");
    o.require(std::abs(j["psi"].get<double>() - psi) <= 1e-12, "best psi differs from the global row");
    const double dx = hyperdet(kEx2);
    o.require(std::abs(dx + 2.7309) <= 5e-4, "Delta(X) " + fmt("%.6f", dx));
    o.notes.push_back("global psi " + fmt("%.6f", psi) + ", Delta(X) " + fmt("%.6f", dx));
    return o;
}

Outcome criterion3() {
    Outcome o;
    const auto d1 = deflate_once(kEx1);
    const auto d2 = deflate_once(kEx2);
    o.require(d1.report.pencil_after && d2.report.pencil_after, "missing residual pencil");
    if (!o.pass)
        return o;
    const EigenPair2& e1 = d1.report.pencil_after->eig;
    const EigenPair2& e2 = d2.report.pencil_after->eig;
    o.require(e1.is_double() && std::abs(e1.values[0] - 0.9185) <= 5e-4 && std::abs(e1.values[1] - 0.9185) <= 5e-4,
              "example 1 eigenvalues " + fmt("%.6f", e1.values[0]) + ", " + fmt("%.6f", e1.values[1]));
    o.require(e1.kind == EigenKind::DoubleRealDefective && e1.eigenvector_count == 1, "example 1 not defective");
    o.require(e2.is_double() && std::abs(e2.values[0] - 1.6712) <= 5e-4 && std::abs(e2.values[1] - 1.6712) <= 5e-4,
              "example 2 eigenvalues " + fmt("%.6f", e2.values[0]) + ", " + fmt("%.6f", e2.values[1]));
    o.notes.push_back("double eigenvalues " + fmt("%.6f", e1.values[0]) + " (" + to_string(e1.kind) + "), " +
                      fmt("%.6f", e2.values[0]) + " (" + to_string(e2.kind) + ")");
    return o;
}

Outcome criterion4() {
    Outcome o;
    const SymTensor222 x71{0, 1, 1, 0};
    const BestRank1Result b71 = best_rank1_sym(x71);
    o.require(std::abs(b71.psi - 1.5) <= 1e-10, "7.1 psi " + fmt("%.15f", b71.psi));
    const Tensor222 z71 = oracle::sym_full(x71) - b71.term.evaluate222();
    o.require(oracle::max_diff(z71, 0.25 * Tensor222({-3, 1, 1, 1, 1, 1, 1, -3})) <= 1e-10, "7.1 residual");
    const auto d71 = deflate_once(x71);
    o.require(d71.report.pencil_after && d71.report.pencil_after->eig.is_double() &&
                  std::abs(d71.report.pencil_after->eig.values[0] + 1) <= 1e-8 &&
                  std::abs(d71.report.pencil_after->eig.values[1] + 1) <= 1e-8,
              "7.1 residual pencil");

    const SymTensor222 x72{3, 1, 1, 3};
    const BestRank1Result b72 = best_rank1_sym(x72);
    o.require(oracle::max_diff(b72.term.evaluate222(), 1.5 * Tensor222({1, 1, 1, 1, 1, 1, 1, 1})) <= 1e-10,
              "7.2 rank-1 term");
    const auto d72 = deflate_once(x72);
    o.require(d72.report.pencil_after && d72.report.pencil_after->eig.is_double() &&
                  std::abs(d72.report.pencil_after->eig.values[0] + 1) <= 1e-8,
              "7.2 residual pencil");
    return o;
}

Outcome criterion5() {
    Outcome o;
    const auto r42 = deflate_once(Tensor222({0, 1, 1, 0, 1, 0, 0, 2}));
    o.require(oracle::max_diff(r42.residual, canonical_tensor(Orbit::D3)) <= 1e-8, "4.2 residual");
    const auto r44 = deflate_once(Tensor222({1, 0, 0, 1, 0, -2, 1, 0}));
    o.require(oracle::max_diff(r44.residual, Tensor222({1, 0, 0, 1, 0, 0, 1, 0})) <= 1e-8, "4.4 residual");
    const std::pair<Tensor222, Orbit> e43[] = {{Tensor222({2, 0, 0, 0, 0, 1, 1, 0}), Orbit::D2},
                                               {Tensor222({1, 0, 0, 0, 0, 1, 2, 0}), Orbit::D2p},
                                               {Tensor222({1, 0, 0, 0, 0, 2, 1, 0}), Orbit::D2pp}};
    for (const auto& [x, expected] : e43) {
        const Orbit got = deflate_once(x).report.orbit_after.orbit;
        o.require(got == expected, std::string("4.3 residual orbit ") + to_string(got) + ", expected " +
                                       to_string(expected));
    }
    const Tensor222 diag[] = {Tensor222({1, 0, 0, 3, 2, 0, 0, 4}), Tensor222({3, 0, 0, 1, 4, 0, 0, 2}),
                              Tensor222({2, 0, 0, 1, 0, 0, 0, 1}), Tensor222({1, 0, 0, 1, 1, 0, 0, 1}),
                              Tensor222({-1, 0, 0, 2, 0.5, 0, 0, -0.3})};
    for (const Tensor222& x : diag) {
        const DeflationReport r = check_degenerate_props(x);
        o.require(r.orbit_after.orbit == Orbit::D1 && r.proposition_holds,
                  std::string("diagonal-slab residual orbit ") + to_string(r.orbit_after.orbit));
    }
    return o;
}

Outcome criterion6() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentStats stats[] = {experiment_generic(1000, kSeed), experiment_symmetric(1000, kSeed)};
    const double dt = seconds_since(t0);
    for (const ExperimentStats& s : stats) {
        std::size_t good = 0;
        for (const TrialRecord& r : s.records)
            good += !r.failed && r.orbit_after == "D3" && std::abs(r.delta_after) <= 1e-6 &&
                    r.mlrank == MultilinearRank{2, 2, 2};
        o.require(good >= 990, s.kind + ": " + std::to_string(good) + "/1000 qualifying trials");
        o.notes.push_back(s.kind + " " + std::to_string(good) + "/1000, max |Delta(Z)|/scale " +
                          fmt("%.2e", s.max_abs_delta_after));
    }
    o.require(dt < 10.0, "runtime " + fmt("%.2f", dt) + " s");
    o.notes.push_back("runtime " + fmt("%.2f", dt) + " s");
    return o;
}

Outcome criterion7() {
    Outcome o;
    auto g = oracle::rng(kSeed);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const Tensor222 x = oracle::random_tensor(g);
        HopmOptions opt;
        opt.seed = kSeed + static_cast<std::uint64_t>(t);
        const double diff = std::abs(best_rank1_222(x).psi - hopm(TensorPxPx2(x), opt).psi);
        worst = std::max(worst, diff);
        o.require(diff <= 1e-6, "trial " + std::to_string(t) + ": enumerate vs hopm " + fmt("%.2e", diff));
    }
    double worst_grid = 0.0, worst_refined = 0.0;
    for (int t = 0; t < 10; ++t) {
        const Tensor222 x = oracle::random_tensor(g);
        const double psi = best_rank1_222(x).psi;
        const oracle::GridResult r = oracle::grid_search_psi(x, 400);
        worst_grid = std::max(worst_grid, std::abs(r.grid_min - psi));
        worst_refined = std::max(worst_refined, std::abs(r.refined_min - psi));
        o.require(r.grid_min >= psi - 1e-9 && r.grid_min - psi <= 1e-2, "grid " + std::to_string(t));
        o.require(std::abs(r.refined_min - psi) <= 1e-6, "refined grid " + std::to_string(t));
    }
    o.notes.push_back("max |enumerate-hopm| " + fmt("%.1e", worst) + ", grid gap " + fmt("%.1e", worst_grid) +
                      ", refined gap " + fmt("%.1e", worst_refined));
    return o;
}

Outcome criterion8() {
    Outcome o;
    auto g = oracle::rng(kSeed + 8);
    std::normal_distribution<double> n;
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        const Tensor222 x = oracle::random_tensor(g);
        const StationaryPolynomials p = stationary_polynomials(x);
        for (int k = 0; k < 50; ++k) {
            const double err = oracle::quotient_identity_error(
                x, p.pz_stat.coeffs(), p.pz_eig1.coeffs(), p.pz_eig2.coeffs(), p.pz_com.coeffs(),
                p.py_stat.coeffs(), p.py_eig1.coeffs(), p.py_eig2.coeffs(), 2.0 * n(g));
            worst = std::max(worst, err);
            o.require(err <= 1e-8, "tensor " + std::to_string(t) + " point " + std::to_string(k) + ": " +
                                       fmt("%.2e", err));
        }
    }
    int n_g3 = 0;
    double worst_disc = 0.0;
    while (n_g3 < 100) {
        const SymTensor222 s = oracle::random_sym(g);
        const NormalizedSymForm f = canonicalize_sym_form(s);
        const double delta = hyperdet(SymTensor222{f.a, 1, 1, f.d});
        if (!f.ok || delta >= 0)
            continue;
        ++n_g3;
        const double disc = oracle::cubic_disc(f.d, -3.0, 3.0, -f.a);
        const double r = std::abs(disc + 27.0 * delta) / std::abs(27.0 * delta);
        worst_disc = std::max(worst_disc, r);
        o.require(r <= 1e-8, "cubic discriminant relative error " + fmt("%.2e", r));
    }
    o.notes.push_back("worst identity error " + fmt("%.1e", worst) + ", worst discriminant error " +
                      fmt("%.1e", worst_disc));
    return o;
}

Outcome criterion9() {
    Outcome o;
    auto g = oracle::rng(kSeed + 9);
    auto check = [&](const SymTensor222& x, Orbit expected, int index) {
        try {
            const CanonicalTransform t = transform_from_canonical(x);
            const Tensor222 y = oracle::transform_direct(oracle::sym_full(sym_canonical(t.orbit)), t.s, t.s, t.s);
            const double res = oracle::frob_diff(y, oracle::sym_full(x));
            const double sc = oracle::sym_max_abs(x);
            o.require(t.orbit == expected, std::string(to_string(expected)) + " input " + std::to_string(index) +
                                               " labelled " + to_string(t.orbit));
            o.require(res <= 1e-6 * sc, std::string(to_string(expected)) + " input " + std::to_string(index) +
                                            " residual " + fmt("%.2e", res / sc));
            o.require(std::abs(det2(t.s)) > 1e-12, "singular S");
            return res / sc;
        } catch (const std::exception& e) {
            o.require(false, std::string(to_string(expected)) + " input " + std::to_string(index) + ": " + e.what());
            return 0.0;
        }
    };
    double worst_g3 = 0.0, worst_d3 = 0.0;
    int n = 0;
    while (n < 500) {
        const SymTensor222 s = oracle::random_sym(g);
        if (hyperdet(s) >= 0)
            continue;
        worst_g3 = std::max(worst_g3, check(s, Orbit::G3, n));
        ++n;
    }
    for (int k = 0; k < 500; ++k) {
        const SymTensor222 z = deflate_once(oracle::random_sym(g)).residual;
        worst_d3 = std::max(worst_d3, check(z, Orbit::D3, k));
    }
    const CanonicalTransform t = transform_from_canonical_D3(0.0, 0.75);
    const double err = std::max({std::abs(t.s(0, 0) - 1), std::abs(t.s(0, 1)), std::abs(t.s(1, 0) - 0.5),
                                 std::abs(t.s(1, 1) - 1)});
    o.require(err <= 1e-12, "(a,d) = (0, 3/4) transform off by " + fmt("%.2e", err));
    o.notes.push_back("worst relative residual G3 " + fmt("%.1e", worst_g3) + ", D3 " + fmt("%.1e", worst_d3));
    return o;
}

Outcome criterion10() {
    Outcome o;
    auto g = oracle::rng(kSeed + 10);
    int agree = 0;
    for (int t = 0; t < 1000; ++t) {
        const SymTensor222 s = oracle::random_sym(g);
        agree += sylvester_rank(s).rank == orbit_rank(classify_sym(s).orbit);
    }
    o.require(agree == 1000, std::to_string(agree) + "/1000 rank agreements");
    const Tensor222 x21({1, 0, 0, 1, 0, -1, 1, 0});
    o.require(detect_infinite_best(x21), "infinite-best condition not detected");
    std::normal_distribution<double> n;
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const Vector y{n(g), n(g)}, z{n(g), n(g)};
        const Vector x = optimal_x(x21, y, z);
        worst = std::max(worst, std::abs(oracle::psi_direct(x21, x, y, z) - 3.0));
    }
    worst = std::max(worst, std::abs(best_rank1_222(x21).psi - 3.0));
    o.require(worst <= 1e-10, "psi deviates from 3 by " + fmt("%.2e", worst));
    return o;
}

Outcome criterion11() {
    Outcome o;
    ExperimentTolerances one;
    one.threads = 1;
    const ExperimentStats a = experiment_pxpx2(3, 500, kSeed);
    const ExperimentStats b = experiment_pxpx2(3, 500, kSeed, one);
    o.require(to_json(a).dump() == to_json(b).dump(), "statistics differ between runs");
    o.require(a.n_converged > 0 && a.fraction_consistent >= 0.9,
              "consistent fraction " + fmt("%.3f", a.fraction_consistent));
    o.notes.push_back("converged " + std::to_string(a.n_converged) + "/500, one coincident pair " +
                      fmt("%.3f", a.fraction_one_coincident_pair) + ", complex-pair decrement " +
                      fmt("%.3f", a.fraction_complex_decrement) + ", consistent " + fmt("%.3f", a.fraction_consistent));
    int listed = 0;
    for (const TrialRecord& r : a.records) {
        if (r.conjecture_consistent)
            continue;
        std::string why = r.failed ? r.failure
                          : !r.converged ? "not converged"
                                         : r.outcome + ", complex pairs " + std::to_string(r.complex_pairs_before) +
                                               " -> " + std::to_string(r.complex_pairs_after);
        o.notes.push_back("inconsistent trial " + std::to_string(r.trial) + ": " + why);
        if (++listed == 25) {
            o.notes.push_back("...");
            break;
        }
    }
    return o;
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"first worked tensor stationary table", criterion1},
        {"second worked tensor stationary table", criterion2},
        {"deflation double eigenvalues", criterion3},
        {"symmetric worked tensors", criterion4},
        {"worked deflations and degenerate orbits", criterion5},
        {"Monte Carlo boundary landing", criterion6},
        {"enumeration against hopm and grid oracles", criterion7},
        {"polynomial identities and cubic discriminant", criterion8},
        {"canonical-form transform round-trips", criterion9},
        {"Sylvester rank and infinite-best example", criterion10},
        {"pxpx2 coincident-pair statistics", criterion11},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << ": " << criteria[i].first << "\n";
        for (const std::string& note : o.notes)
            std::cout << "    " << note << "\n";
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
              << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
