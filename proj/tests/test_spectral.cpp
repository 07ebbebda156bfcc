#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "nnarx/errors.hpp"
#include "nnarx/rng.hpp"
#include "nnarx/spectral.hpp"

using namespace nnarx;

namespace {

Eigen::MatrixXd random_matrix(Rng& rng, int rows, int cols) {
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            m(r, c) = rng.gaussian();
        }
    }
    return m;
}

// independent oracle: full Jacobi SVD
double svd_norm(const Eigen::MatrixXd& m) {
    return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
}

}  // namespace

TEST_SUITE_BEGIN("spectral");

TEST_CASE("identity 3x3 has norm 1") {
    CHECK(spectral_norm(Eigen::MatrixXd::Identity(3, 3)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("diagonal matrix returns the largest entry") {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = 2.0;
    CHECK(spectral_norm(d) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("zero matrix has norm 0") {
    CHECK(spectral_norm(Eigen::MatrixXd::Zero(4, 3)) == 0.0);
}

TEST_CASE("random 10x8 agrees with the SVD oracle to 1e-8 relative") {
    Rng rng(2024);
    const Eigen::MatrixXd m = random_matrix(rng, 10, 8);
    const double expected = svd_norm(m);
    CHECK(spectral_norm(m) == doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("agreement with the oracle over many shapes") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const int rows = 1 + static_cast<int>(rng.uniform_int(0, 19));
        const int cols = 1 + static_cast<int>(rng.uniform_int(0, 19));
        const Eigen::MatrixXd m = random_matrix(rng, rows, cols);
        const double expected = svd_norm(m);
        const double got = spectral_norm(m);
        CHECK(std::abs(got - expected) <= 1e-8 * std::max(expected, 1e-30));
    }
}

TEST_CASE("norm of the transpose matches") {
    Rng rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::MatrixXd m = random_matrix(rng, 7, 4);
        CHECK(spectral_norm(m.transpose()) ==
              doctest::Approx(spectral_norm(m)).epsilon(1e-9));
    }
}

TEST_CASE("returned singular pair satisfies M v = sigma u") {
    Rng rng(7);
    const Eigen::MatrixXd m = random_matrix(rng, 6, 5);
    const auto res = spectral_norm_full(m);
    CHECK((m * res.right - res.sigma * res.left).norm() <= 1e-8 * res.sigma);
    CHECK(res.right.norm() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(res.left.norm() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("invalid inputs are rejected") {
    Eigen::MatrixXd nan_mat = Eigen::MatrixXd::Zero(2, 2);
    nan_mat(0, 0) = std::nan("");
    CHECK_THROWS_AS(spectral_norm(nan_mat), InvalidArgument);
    CHECK_THROWS_AS(spectral_norm(Eigen::MatrixXd::Identity(2, 2), -1.0), InvalidArgument);
}

TEST_CASE("iteration cap produces ConvergenceFailure with the best estimate") {
    Rng rng(8);
    const Eigen::MatrixXd m = random_matrix(rng, 12, 12);
    try {
        spectral_norm(m, 1e-10, 1);  // absurd cap
        FAIL("expected ConvergenceFailure");
    } catch (const ConvergenceFailure& e) {
        CHECK(e.best_estimate > 0.0);
        CHECK(e.best_estimate == doctest::Approx(svd_norm(m)).epsilon(0.5));
    }
}

TEST_SUITE_END();
