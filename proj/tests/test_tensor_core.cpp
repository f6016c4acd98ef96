#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "tensorbit/orbits.hpp"
#include "tensorbit/tensor.hpp"

using namespace tensorbit;

namespace {

const Tensor222 kEx1({-0.4326, 0.1253, -1.6656, 0.2877, -1.1465, 1.1892, 1.1909, -0.0376});
const Tensor222 kEx21({1, 0, 0, 1, 0, -1, 1, 0});

void check_matrix(const Matrix& m, const Matrix& expected, double tol) {
    REQUIRE(m.rows() == expected.rows());
    REQUIRE(m.cols() == expected.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            CHECK(std::abs(m(i, j) - expected(i, j)) <= tol);
}

} // namespace

TEST_SUITE("tensor_core") {

TEST_CASE("element layout is slab-major") {
    const Tensor222 x({1, 2, 3, 4, 5, 6, 7, 8});
    CHECK(x(0, 1, 0) == 2);
    CHECK(x(1, 0, 0) == 3);
    CHECK(x(0, 0, 1) == 5);
    CHECK(x(1, 1, 1) == 8);
    check_matrix(x.slab(1), Matrix{{5, 6}, {7, 8}}, 0);
}

TEST_CASE("contract G2 with e1 in mode 3 selects the first slab") {
    const double v[2] = {1.0, 0.0};
    check_matrix(contract_mode(canonical_tensor(Orbit::G2), v, 3), Matrix{{1, 0}, {0, 0}}, 0);
}

TEST_CASE("Example 2.1 contracted with any unit z is orthogonal") {
    auto g = oracle::rng(1);
    std::uniform_real_distribution<double> u(0.0, 6.3);
    for (int n = 0; n < 50; ++n) {
        const double t = u(g);
        const double z[2] = {std::cos(t), std::sin(t)};
        const Matrix m = contract_mode(kEx21, z, 3);
        check_matrix(m.transposed() * m, Matrix::identity(2), 1e-14);
    }
}

TEST_CASE("mode contractions match direct summation") {
    auto g = oracle::rng(2);
    for (int n = 0; n < 20; ++n) {
        const Tensor222 x = oracle::random_tensor(g);
        const Matrix v = oracle::random_matrix(g, 1, 2);
        const double w[2] = {v(0, 0), v(0, 1)};
        for (int mode = 1; mode <= 3; ++mode) {
            const Matrix m = contract_mode(x, w, mode);
            Matrix expected(2, 2);
            for (int p = 0; p < 2; ++p)
                for (int q = 0; q < 2; ++q)
                    for (int r = 0; r < 2; ++r) {
                        if (mode == 1)
                            expected(p, q) += w[r] * oracle::entry(x, r, p, q);
                        else if (mode == 2)
                            expected(p, q) += w[r] * oracle::entry(x, p, r, q);
                        else
                            expected(p, q) += w[r] * oracle::entry(x, p, q, r);
                    }
            check_matrix(m, expected, 1e-13);
        }
    }
}

TEST_CASE("mode-3 contraction with random pxpx2 is a slab combination") {
    auto g = oracle::rng(3);
    const TensorPxPx2 x = oracle::random_pxpx2(g, 4);
    const double w[2] = {0.3, -1.7};
    check_matrix(contract_mode(x, w, 3), 0.3 * x.slab(0) + (-1.7) * x.slab(1), 1e-14);
}

TEST_CASE("multilinear transform") {
    auto g = oracle::rng(4);
    const Matrix id = Matrix::identity(2);
    const Tensor222 x = oracle::random_tensor(g);
    CHECK(multilinear_transform(x, id, id, id) == x);

    for (int n = 0; n < 50; ++n) {
        const Tensor222 y = oracle::random_tensor(g);
        const Matrix s = oracle::random_matrix(g, 2, 2), t = oracle::random_matrix(g, 2, 2),
                     u = oracle::random_matrix(g, 2, 2);
        CHECK(oracle::max_diff(multilinear_transform(y, s, t, u), oracle::transform_direct(y, s, t, u)) <
              1e-12);
    }
}

TEST_CASE("S = [1 0; 1/2 1] maps canonical D3 to the symmetric (0, 3/4) form") {
    const Matrix s{{1, 0}, {0.5, 1}};
    const Tensor222 y = multilinear_transform(canonical_tensor(Orbit::D3), s, s, s);
    const Tensor222 expected({0, 1, 1, 1, 1, 1, 1, 0.75});
    CHECK(oracle::max_diff(y, expected) < 1e-15);
}

TEST_CASE("transform composition and linearity") {
    auto g = oracle::rng(5);
    for (int n = 0; n < 30; ++n) {
        const Tensor222 x = oracle::random_tensor(g), y = oracle::random_tensor(g);
        Matrix m[6];
        for (Matrix& mm : m)
            mm = oracle::random_matrix(g, 2, 2);
        const Tensor222 lhs = multilinear_transform(multilinear_transform(x, m[0], m[1], m[2]), m[3], m[4], m[5]);
        const Tensor222 rhs = multilinear_transform(x, m[3] * m[0], m[4] * m[1], m[5] * m[2]);
        CHECK(oracle::max_diff(lhs, rhs) < 1e-11 * (1.0 + max_abs(lhs)));

        const Tensor222 sum = multilinear_transform(2.0 * x + y, m[0], m[1], m[2]);
        const Tensor222 parts =
            2.0 * multilinear_transform(x, m[0], m[1], m[2]) + multilinear_transform(y, m[0], m[1], m[2]);
        CHECK(oracle::max_diff(sum, parts) < 1e-12 * (1.0 + max_abs(sum)));
    }
}

TEST_CASE("norms") {
    CHECK(frobenius_norm_sq(Tensor222{}) == 0.0);
    CHECK(frobenius_norm_sq(kEx21) == 4.0);
    // Printed to four significant figures.
    CHECK(std::abs(frobenius_norm_sq(kEx1) - 7.208) <= 5e-4);
}

TEST_CASE("orthonormal transforms preserve the norm") {
    auto g = oracle::rng(6);
    for (int n = 0; n < 100; ++n) {
        const Tensor222 x = oracle::random_tensor(g);
        const Tensor222 y = multilinear_transform(x, oracle::random_rotation(g), oracle::random_rotation(g),
                                                  oracle::random_rotation(g));
        CHECK(frobenius_norm_sq(y) == doctest::Approx(frobenius_norm_sq(x)).epsilon(1e-13));
    }
}

TEST_CASE("multilinear ranks") {
    CHECK(multilinear_rank(canonical_tensor(Orbit::D2)) == MultilinearRank{2, 2, 1});
    CHECK(multilinear_rank(canonical_tensor(Orbit::D3)) == MultilinearRank{2, 2, 2});
    const double e1[2] = {1, 0};
    CHECK(multilinear_rank(outer222(e1, e1, e1)) == MultilinearRank{1, 1, 1});
    CHECK(multilinear_rank(Tensor222{}) == MultilinearRank{0, 0, 0});
}

TEST_CASE("multilinear rank is invariant under invertible transforms") {
    auto g = oracle::rng(7);
    const Orbit orbits[] = {Orbit::D1, Orbit::D2, Orbit::D2p, Orbit::D2pp, Orbit::G2, Orbit::D3, Orbit::G3};
    for (Orbit o : orbits) {
        const Tensor222 x = canonical_tensor(o);
        for (int n = 0; n < 20; ++n) {
            const Tensor222 y = multilinear_transform(x, oracle::random_matrix(g, 2, 2),
                                                      oracle::random_matrix(g, 2, 2),
                                                      oracle::random_matrix(g, 2, 2));
            CHECK(multilinear_rank(y) == multilinear_rank(x));
        }
    }
}

TEST_CASE("pxpx2 unfolding ranks") {
    auto g = oracle::rng(8);
    const TensorPxPx2 x = oracle::random_pxpx2(g, 3);
    CHECK(multilinear_rank(x) == MultilinearRank{3, 3, 2});
    CHECK(TensorPxPx2(kEx1).to_222() == kEx1);
}

TEST_CASE("rank-1 terms evaluate as outer products") {
    const Rank1Term t{{1, 2}, {3, 4}, {5, 6}};
    const Tensor222 y = t.evaluate222();
    CHECK(y(1, 0, 1) == 2 * 3 * 6);
    CHECK(t.evaluate().to_222() == y);
}

}
