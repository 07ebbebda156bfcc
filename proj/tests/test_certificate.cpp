#include <doctest.h>

#include <cmath>

#include "nnarx/certificate.hpp"
#include "nnarx/errors.hpp"
#include "test_helpers.hpp"

using namespace nnarx;
using nnarx_test::make_random_model;

namespace {

// Model whose layer spectral norms are exact by construction: each weight
// matrix has a single nonzero entry.
NnarxModel model_with_norms(int N, double u0_norm, double u1_norm, int hidden = 10) {
    NnarxModel model;
    model.N = N;
    model.m = 1;
    model.p = 1;
    model.norm = NormalizationStats::identity(1, 1);
    FfnnLayer layer;
    layer.W = Eigen::MatrixXd::Zero(hidden, 1);
    layer.U = Eigen::MatrixXd::Zero(hidden, 2 * N);
    layer.U(0, 0) = u1_norm;
    layer.b = Eigen::VectorXd::Zero(hidden);
    layer.activation = tanh_activation();
    model.ffnn.layers.push_back(layer);
    model.ffnn.U0 = Eigen::MatrixXd::Zero(1, hidden);
    model.ffnn.U0(0, 0) = u0_norm;
    model.ffnn.b0 = Eigen::VectorXd::Zero(1);
    return model;
}

}  // namespace

TEST_SUITE_BEGIN("certificate");

TEST_CASE("compute_constants: single-layer collapse") {
    // K_x = a b, K_u = a w, K_b = a for M = 1 with tanh
    NnarxModel model = model_with_norms(2, 0.7, 0.4, 5);
    model.ffnn.layers[0].W(0, 0) = 0.9;
    const auto k = compute_constants(model.ffnn);
    CHECK(k.K_x == doctest::Approx(0.7 * 0.4).epsilon(1e-10));
    CHECK(k.K_u == doctest::Approx(0.7 * 0.9).epsilon(1e-10));
    CHECK(k.K_b == doctest::Approx(0.7).epsilon(1e-10));
}

TEST_CASE("compute_constants: all-zero state weights give zero constants") {
    NnarxModel model = model_with_norms(2, 0.0, 0.0, 4);
    const auto k = compute_constants(model.ffnn);
    CHECK(k.K_x == 0.0);
    CHECK(k.K_u == 0.0);
    CHECK(k.K_b == 0.0);
}

TEST_CASE("compute_constants: M=2 network matches a literal re-evaluation") {
    const auto model = make_random_model(55, 3, 2, 1, {5, 4}, -0.1);
    const auto k = compute_constants(model.ffnn);

    // direct formula evaluation with the oracle norms
    const double u0 = spectral_norm(model.ffnn.U0);
    const double u1 = spectral_norm(model.ffnn.layers[0].U);
    const double u2 = spectral_norm(model.ffnn.layers[1].U);
    const double w1 = spectral_norm(model.ffnn.layers[0].W);
    const double w2 = spectral_norm(model.ffnn.layers[1].W);
    // L = 1 for tanh
    const double kx = u0 * u1 * u2;
    const double ku = u0 * (u2 * w1 + w2);
    const double kb = u0 * (u2 + 1.0);

    CHECK(k.K_x == doctest::Approx(kx).epsilon(1e-12));
    CHECK(k.K_u == doctest::Approx(ku).epsilon(1e-12));
    CHECK(k.K_b == doctest::Approx(kb).epsilon(1e-12));
}

TEST_CASE("stability_residual: zero weights with N=4 give nu = -0.5") {
    const auto model = model_with_norms(4, 0.0, 0.0);
    CHECK(stability_residual(model) == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("stability_residual: reported norms of the benchmark profile") {
    // ||U_0|| = 0.453, ||U_1|| = 0.985, N = 4, tanh
    const auto model = model_with_norms(4, 0.453, 0.985);
    const double nu = stability_residual(model);
    CHECK(nu == doctest::Approx(0.453 * 0.985 - 0.5).epsilon(1e-10));
    CHECK(nu == doctest::Approx(-0.0538).epsilon(2e-3));
}

TEST_CASE("boundary nu = 0 is NOT certified (strict inequality)") {
    const auto model = model_with_norms(1, 1.0, 1.0);
    CHECK(stability_residual(model) == doctest::Approx(0.0).epsilon(1e-12));
    const auto report = certify(model);
    CHECK(report.verdict == Verdict::NotCertified);
}

TEST_CASE("certify: zero-weight model is certified with nu = -1/sqrt(N)") {
    for (int N : {1, 2, 4, 9}) {
        const auto model = model_with_norms(N, 0.0, 0.0);
        const auto report = certify(model);
        CHECK(report.certified());
        CHECK(report.residual ==
              doctest::Approx(-1.0 / std::sqrt(static_cast<double>(N))).epsilon(1e-12));
    }
}

TEST_CASE("certify: benchmark profile is certified") {
    const auto report = certify(model_with_norms(4, 0.453, 0.985));
    CHECK(report.certified());
    CHECK(report.spectral_norms[0] == doctest::Approx(0.453).epsilon(1e-10));
    CHECK(report.spectral_norms[1] == doctest::Approx(0.985).epsilon(1e-10));
    CHECK(report.threshold == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("certify: unit norms with N=4 are rejected with nu = +0.5") {
    const auto report = certify(model_with_norms(4, 1.0, 1.0));
    CHECK(!report.certified());
    CHECK(report.residual == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("certify rejects NaN weights") {
    auto model = model_with_norms(2, 0.5, 0.5);
    model.ffnn.U0(0, 3) = std::nan("");
    CHECK_THROWS_AS(certify(model), InvalidModel);
}

TEST_CASE("certificate monotonicity under weight scaling") {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        auto model = make_random_model(seed, 3, 1, 1, {6}, -0.2);
        const double nu0 = stability_residual(model);
        for (double lam : {1.3, 2.0}) {
            auto scaled = model;
            for (auto& L : scaled.ffnn.layers) L.U *= lam;
            scaled.ffnn.U0 *= lam;
            CHECK(stability_residual(scaled) >= nu0 - 1e-12);
        }
        for (double lam : {0.8, 0.25}) {
            auto scaled = model;
            for (auto& L : scaled.ffnn.layers) L.U *= lam;
            scaled.ffnn.U0 *= lam;
            CHECK(stability_residual(scaled) <= nu0 + 1e-12);
        }
    }
}

TEST_CASE("lyapunov_matrix: N=1 SISO gives the 2x2 identity") {
    const auto lyap = lyapunov_matrix(1, 1, 1);
    CHECK(lyap.P == Eigen::MatrixXd::Identity(2, 2));
}

TEST_CASE("lyapunov_matrix: N=4 SISO gives diag(1,1,2,2,3,3,4,4)") {
    const auto lyap = lyapunov_matrix(4, 1, 1);
    Eigen::VectorXd expected(8);
    expected << 1, 1, 2, 2, 3, 3, 4, 4;
    CHECK(lyap.P.diagonal() == expected);
    CHECK(lyap.P == Eigen::MatrixXd(expected.asDiagonal()));
}

TEST_CASE("Lyapunov identity is exact for all shapes up to (6,3,3)") {
    for (int N = 1; N <= 6; ++N) {
        for (int m = 1; m <= 3; ++m) {
            for (int p = 1; p <= 3; ++p) {
                const auto lyap = lyapunov_matrix(N, m, p);
                const auto cm = build_canonical_matrices(N, m, p);
                const Eigen::MatrixXd residual =
                    cm.A.transpose() * lyap.P * cm.A - lyap.P +
                    Eigen::MatrixXd::Identity(lyap.P.rows(), lyap.P.cols());
                CHECK(residual.lpNorm<Eigen::Infinity>() == 0.0);
                // sandwich x'Px in [||x||^2, N ||x||^2]
                const auto x = nnarx_test::random_state(99, N, m, p, 3.0);
                const double v = x.x.dot(lyap.P * x.x);
                CHECK(v >= x.x.squaredNorm() - 1e-9);
                CHECK(v <= N * x.x.squaredNorm() + 1e-9);
            }
        }
    }
}

TEST_SUITE_END();
