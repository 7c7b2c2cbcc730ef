#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "guttnmf/nmf.hpp"
#include "helpers.hpp"

using namespace guttnmf;
using namespace guttnmf::testing;

namespace {

double recon_sq(const DenseMatrix& V, const DenseMatrix& W,
                const DenseMatrix& H) {
    return frobenius_sq(subtract(V, matmul(W, H)));
}

}  // namespace

TEST_CASE("validate_nmf_input") {
    Rng rng(71);
    DenseMatrix V = random_matrix(rng, 6, 4, 0.0, 1.0);
    NmfConfig cfg;
    cfg.k = 3;

    CHECK_NOTHROW(validate_nmf_input(V, cfg));

    SUBCASE("negative entry rejected") {
        DenseMatrix neg = V;
        neg(2, 1) = -0.5;
        CHECK_THROWS_AS(validate_nmf_input(neg, cfg), std::invalid_argument);
    }

    SUBCASE("all-zero matrix rejected") {
        CHECK_THROWS_AS(validate_nmf_input(DenseMatrix(6, 4), cfg),
                        std::invalid_argument);
    }

    SUBCASE("rank bounds") {
        NmfConfig bad = cfg;
        bad.k = 0;
        CHECK_THROWS_AS(validate_nmf_input(V, bad), std::invalid_argument);
        bad.k = 5;  // > min(6,4)
        CHECK_THROWS_AS(validate_nmf_input(V, bad), std::invalid_argument);
        bad.k = 4;
        CHECK_NOTHROW(validate_nmf_input(V, bad));
    }

    SUBCASE("tolerance and iteration bounds") {
        NmfConfig bad = cfg;
        bad.tol = 0.0;
        CHECK_THROWS_AS(validate_nmf_input(V, bad), std::invalid_argument);
        bad = cfg;
        bad.max_iter = 0;
        CHECK_THROWS_AS(validate_nmf_input(V, bad), std::invalid_argument);
    }
}

TEST_CASE("init_factors") {
    Rng rng(73);
    DenseMatrix V = random_matrix(rng, 8, 6, 0.0, 2.0);
    NmfConfig cfg;
    cfg.k = 4;
    cfg.seed = 99;

    Factorization a = init_factors(V, cfg);
    CHECK(a.W.rows() == 8);
    CHECK(a.W.cols() == 4);
    CHECK(a.H.rows() == 4);
    CHECK(a.H.cols() == 6);

    SUBCASE("strictly positive, bounded by the scale") {
        const double scale = std::sqrt(V.sum() / double(V.size()) / 4.0);
        for (double v : a.W.data()) {
            CHECK(v > 0.0);
            CHECK(v <= scale);
        }
        for (double v : a.H.data()) {
            CHECK(v > 0.0);
            CHECK(v <= scale);
        }
    }

    SUBCASE("deterministic per seed, different across seeds") {
        Factorization b = init_factors(V, cfg);
        for (std::size_t i = 0; i < a.W.size(); ++i) {
            CHECK(a.W.data()[i] == b.W.data()[i]);
        }
        for (std::size_t i = 0; i < a.H.size(); ++i) {
            CHECK(a.H.data()[i] == b.H.data()[i]);
        }
        NmfConfig other = cfg;
        other.seed = 100;
        Factorization c = init_factors(V, other);
        CHECK(max_abs_diff(a.W, c.W) > 0.0);
    }
}

TEST_CASE("update rules match the multiplicative formulas") {
    Rng rng(79);
    DenseMatrix V = random_matrix(rng, 5, 7, 0.0, 1.0);
    DenseMatrix W = random_matrix(rng, 5, 3, 0.01, 1.0);
    DenseMatrix H = random_matrix(rng, 3, 7, 0.01, 1.0);

    SUBCASE("W step") {
        DenseMatrix got = nmf_update_w(V, W, H);
        DenseMatrix vh = naive_matmul(V, transpose(H));
        DenseMatrix whh = naive_matmul(W, naive_matmul(H, transpose(H)));
        for (std::size_t i = 0; i < W.rows(); ++i) {
            for (std::size_t j = 0; j < W.cols(); ++j) {
                const double expected =
                    W(i, j) * vh(i, j) / (whh(i, j) + kDenomEps);
                CHECK(got(i, j) ==
                      doctest::Approx(expected).epsilon(1e-12));
            }
        }
    }

    SUBCASE("H step") {
        DenseMatrix got = nmf_update_h(V, W, H);
        DenseMatrix wv = naive_matmul(transpose(W), V);
        DenseMatrix wwh = naive_matmul(naive_matmul(transpose(W), W), H);
        for (std::size_t i = 0; i < H.rows(); ++i) {
            for (std::size_t j = 0; j < H.cols(); ++j) {
                const double expected =
                    H(i, j) * wv(i, j) / (wwh(i, j) + kDenomEps);
                CHECK(got(i, j) ==
                      doctest::Approx(expected).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("nmf_fit objective is monotone and factors stay non-negative") {
    Rng rng(83);
    for (int trial = 0; trial < 5; ++trial) {
        DenseMatrix V = random_matrix(rng, 20, 15, 0.0, 1.0);
        NmfConfig cfg;
        cfg.k = 5;
        cfg.seed = 10 + trial;
        cfg.max_iter = 120;
        Factorization f = nmf_fit(V, cfg);
        REQUIRE(f.objective_history.size() >= 2);
        for (std::size_t t = 1; t < f.objective_history.size(); ++t) {
            CHECK(f.objective_history[t] <=
                  f.objective_history[t - 1] + 1e-9);
        }
        CHECK(f.W.is_nonnegative());
        CHECK(f.H.is_nonnegative());
        CHECK(f.objective_history.back() ==
              doctest::Approx(recon_sq(V, f.W, f.H)).epsilon(1e-9));
    }
}

TEST_CASE("nmf_fit recovers a planted rank-1 matrix") {
    Rng rng(89);
    std::vector<double> wcol(12), hrow(9);
    for (double& v : wcol) v = rng.uniform(0.2, 1.0);
    for (double& v : hrow) v = rng.uniform(0.2, 1.0);
    DenseMatrix V(12, 9);
    for (std::size_t i = 0; i < 12; ++i) {
        for (std::size_t j = 0; j < 9; ++j) {
            V(i, j) = wcol[i] * hrow[j];
        }
    }
    NmfConfig cfg;
    cfg.k = 1;
    cfg.max_iter = 5000;
    cfg.tol = 1e-13;
    cfg.seed = 3;
    Factorization f = nmf_fit(V, cfg);
    CHECK(recon_sq(V, f.W, f.H) / frobenius_sq(V) < 1e-10);
}

TEST_CASE("scaling V scales the trajectory quadratically") {
    // Same seed: init factors scale by sqrt(c), the update ratios are
    // scale-free, so every history entry scales by c^2 (up to the epsilon
    // guard).
    Rng rng(97);
    DenseMatrix V = random_matrix(rng, 10, 8, 0.1, 1.0);
    const double c = 7.0;
    DenseMatrix cV = V;
    for (double& v : cV.data()) v *= c;

    NmfConfig cfg;
    cfg.k = 3;
    cfg.seed = 21;
    cfg.max_iter = 40;
    cfg.tol = 1e-30;  // never triggers; both runs take all 40 sweeps
    Factorization base = nmf_fit(V, cfg);
    Factorization scaled = nmf_fit(cV, cfg);
    REQUIRE(base.objective_history.size() == 41);
    REQUIRE(scaled.objective_history.size() == 41);
    for (std::size_t t = 0; t < base.objective_history.size(); ++t) {
        CHECK(scaled.objective_history[t] ==
              doctest::Approx(c * c * base.objective_history[t])
                  .epsilon(1e-9));
    }
}

TEST_CASE("nmf_fit_from and stopping") {
    Rng rng(101);
    DenseMatrix V = random_matrix(rng, 9, 7, 0.0, 1.0);
    NmfConfig cfg;
    cfg.k = 2;
    cfg.seed = 5;

    SUBCASE("history starts at the supplied factors' objective") {
        DenseMatrix W = random_matrix(rng, 9, 2, 0.01, 1.0);
        DenseMatrix H = random_matrix(rng, 2, 7, 0.01, 1.0);
        const double start = recon_sq(V, W, H);
        Factorization f = nmf_fit_from(V, W, H, cfg);
        REQUIRE(!f.objective_history.empty());
        CHECK(f.objective_history.front() ==
              doctest::Approx(start).epsilon(1e-12));
        CHECK(f.objective_history.back() <= start + 1e-9);
    }

    SUBCASE("loose tolerance stops early") {
        NmfConfig loose = cfg;
        loose.tol = 0.9;
        Factorization f = nmf_fit(V, loose);
        CHECK(f.objective_history.size() <= 4);
    }

    SUBCASE("max_iter bounds the sweep count") {
        NmfConfig capped = cfg;
        capped.max_iter = 7;
        capped.tol = 1e-30;
        Factorization f = nmf_fit(V, capped);
        CHECK(f.objective_history.size() == 8);
    }
}
