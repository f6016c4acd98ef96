#include "doctest.h"

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "tensorbit/deflation.hpp"

using namespace tensorbit;

namespace {

const Tensor222 kEx1({-0.4326, 0.1253, -1.6656, 0.2877, -1.1465, 1.1892, 1.1909, -0.0376});
const Tensor222 kEx2({-1.6041, -1.0565, 0.2573, 1.4151, 0.8156, 1.2902, 0.7119, 0.6686});

std::size_t count_of(const ExperimentStats& s, const std::string& label) {
    for (const auto& [l, n] : s.counts)
        if (l == label)
            return n;
    return 0;
}

} // namespace

TEST_SUITE("deflation") {

TEST_CASE("worked tensors land on a defective double eigenvalue") {
    const auto d1 = deflate_once(kEx1);
    CHECK(d1.report.orbit_after.orbit == Orbit::D3);
    REQUIRE(d1.report.pencil_after.has_value());
    CHECK(d1.report.pencil_after->eig.kind == EigenKind::DoubleRealDefective);
    CHECK(std::abs(d1.report.pencil_after->eig.values[0] - 0.9185) <= 5e-4);
    CHECK(d1.report.coincidence_consistent);

    const auto d2 = deflate_once(kEx2);
    CHECK(d2.report.orbit_after.orbit == Orbit::D3);
    REQUIRE(d2.report.pencil_after.has_value());
    CHECK(std::abs(d2.report.pencil_after->eig.values[0] - 1.6712) <= 5e-4);
    CHECK(d2.report.orbit_before.orbit == Orbit::G3);
    CHECK(d2.report.psi >= 0.0);
}

TEST_CASE("symmetric worked tensors") {
    const auto d = deflate_once(SymTensor222{0, 1, 1, 0});
    CHECK(d.report.orbit_after.orbit == Orbit::D3);
    REQUIRE(d.report.pencil_after.has_value());
    const Matrix& q = d.report.pencil_after->quotient;
    CHECK(std::abs(q(0, 0) - 0) < 1e-10);
    CHECK(std::abs(q(0, 1) - 1) < 1e-10);
    CHECK(std::abs(q(1, 0) + 1) < 1e-10);
    CHECK(std::abs(q(1, 1) + 2) < 1e-10);
    CHECK(std::abs(d.report.pencil_after->eig.values[0] + 1) < 1e-8);

    const auto d72 = deflate_once(SymTensor222{3, 1, 1, 3});
    CHECK(d72.report.orbit_after.orbit == Orbit::D3);
    CHECK(std::abs(d72.report.pencil_after->eig.values[0] + 1) < 1e-8);
}

TEST_CASE("degenerate orbits deflate as predicted") {
    const auto e43a = deflate_once(Tensor222({2, 0, 0, 0, 0, 1, 1, 0}));
    CHECK(e43a.report.orbit_after.orbit == Orbit::D2);
    CHECK(deflate_once(Tensor222({1, 0, 0, 0, 0, 1, 2, 0})).report.orbit_after.orbit == Orbit::D2p);
    CHECK(deflate_once(Tensor222({1, 0, 0, 0, 0, 2, 1, 0})).report.orbit_after.orbit == Orbit::D2pp);

    const auto r42 = deflate_once(Tensor222({0, 1, 1, 0, 1, 0, 0, 2}));
    CHECK(oracle::max_diff(r42.residual, canonical_tensor(Orbit::D3)) <= 1e-8);
    CHECK(deflate_once(canonical_tensor(Orbit::D3)).report.orbit_after.orbit == Orbit::D3);
}

TEST_CASE("degenerate proposition checks") {
    const DeflationReport d2 = check_degenerate_props(Tensor222({3, 0, 0, 1.5, 0, 0, 0, 0}));
    CHECK(d2.expected_after == Orbit::D1);
    CHECK(d2.orbit_after.orbit == Orbit::D1);
    CHECK(d2.proposition_holds);

    const DeflationReport d1 = check_degenerate_props(canonical_tensor(Orbit::D1));
    CHECK(d1.orbit_after.orbit == Orbit::D0);
    CHECK(d1.proposition_holds);

    // Diagonal slabs with a^2 + e^2 < d^2 + h^2: the (d, h) term is removed.
    const Tensor222 diag({1, 0, 0, 3, 2, 0, 0, 4});
    const auto out = deflate_once(diag);
    CHECK(oracle::max_diff(out.residual, Tensor222({1, 0, 0, 0, 2, 0, 0, 0})) <= 1e-10);
    const DeflationReport dd = check_degenerate_props(diag);
    CHECK(dd.orbit_after.orbit == Orbit::D1);
    CHECK(dd.proposition_holds);
    CHECK(dd.ties == 1);

    // a^2 + e^2 = d^2 + h^2 with ah = de: a continuum of minimizers.
    const DeflationReport tie = check_degenerate_props(Tensor222({1, 0, 0, 1, 1, 0, 0, 1}));
    CHECK(tie.ties >= 2);
    CHECK(tie.infinite_ties);
    CHECK(tie.proposition_holds);

    CHECK_THROWS_AS(check_degenerate_props(kEx1), std::domain_error);
}

TEST_CASE("pxpx2 deflation reports spectra") {
    auto g = oracle::rng(60);
    const TensorPxPx2 x = oracle::random_pxpx2(g, 3);
    const auto out = deflate_once(x, HopmOptions{});
    REQUIRE(out.report.spectrum_before.has_value());
    REQUIRE(out.report.spectrum_after.has_value());
    CHECK(out.report.spectrum_after->eigenvalues.size() == 3);
    CHECK(out.report.converged);
    CHECK(frobenius_norm_sq(out.residual) == doctest::Approx(out.report.psi).epsilon(1e-10));
}

TEST_CASE("generic experiment") {
    const ExperimentStats s = experiment_generic(300, 42);
    std::size_t total = 0;
    for (const auto& [label, n] : s.counts)
        total += n;
    CHECK(total == s.trials);
    CHECK(s.fraction_d3 >= 0.99);
    CHECK(s.n_mlrank_222 >= 297);
    CHECK(s.n_z_gap_small >= 297);
    CHECK(s.n_x_gap_large >= 285);
    CHECK(s.failures == 0);
    CHECK_THROWS_AS(experiment_generic(0, 1), std::invalid_argument);
}

TEST_CASE("symmetric experiment") {
    const ExperimentStats s = experiment_symmetric(300, 7);
    CHECK(s.fraction_d3 >= 0.99);
    CHECK(count_of(s, "D3") == static_cast<std::size_t>(std::lround(s.fraction_d3 * 300)));
}

TEST_CASE("fixed-input harness") {
    const ExperimentStats one = experiment_on(std::vector<Tensor222>{kEx1});
    CHECK(one.trials == 1);
    CHECK(count_of(one, "D3") == 1);

    const ExperimentStats sym = experiment_on(std::vector<SymTensor222>{{0, 1, 1, 0}, {3, 1, 1, 3}});
    CHECK(count_of(sym, "D3") == 2);
}

TEST_CASE("D3 closure experiment") {
    const ExperimentStats s = experiment_d3_closure(200, 3);
    CHECK(count_of(s, "D3") > 100);
    CHECK(s.failures == 0);
}

TEST_CASE("pxpx2 experiment") {
    const ExperimentStats s2 = experiment_pxpx2(2, 50, 5);
    CHECK(s2.fraction_one_coincident_pair >= 0.95);

    const ExperimentStats s3 = experiment_pxpx2(3, 60, 5);
    CHECK(s3.n_converged >= 55);
    CHECK(s3.fraction_one_coincident_pair >= 0.9);
    CHECK_THROWS_AS(experiment_pxpx2(9, 10, 5), std::invalid_argument);
    CHECK_THROWS_AS(experiment_pxpx2(1, 10, 5), std::invalid_argument);
}

TEST_CASE("experiments are identical across runs and thread counts") {
    ExperimentTolerances one;
    one.threads = 1;
    ExperimentTolerances four;
    four.threads = 4;
    const auto a = to_json(experiment_generic(100, 99, one)).dump();
    const auto b = to_json(experiment_generic(100, 99, four)).dump();
    const auto c = to_json(experiment_generic(100, 99, four)).dump();
    CHECK(a == b);
    CHECK(b == c);

    const auto p1 = to_json(experiment_pxpx2(3, 30, 11, one)).dump();
    const auto p4 = to_json(experiment_pxpx2(3, 30, 11, four)).dump();
    CHECK(p1 == p4);
}

TEST_CASE("CSV has one row per trial") {
    const ExperimentStats s = experiment_generic(10, 1);
    std::ostringstream os;
    write_csv(s, os);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "trial,seed,orbit_before,orbit_after,delta_before,delta_after,psi,eigen_gap,mlrank");
    int rows = 0;
    while (std::getline(is, line))
        ++rows;
    CHECK(rows == 10);
}

}
