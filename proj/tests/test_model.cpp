#include <doctest.h>

#include <cmath>

#include "nnarx/canonical.hpp"
#include "nnarx/certificate.hpp"
#include "nnarx/errors.hpp"
#include "nnarx/ffnn.hpp"
#include "nnarx/model.hpp"
#include "test_helpers.hpp"

using namespace nnarx;
using nnarx_test::make_random_model;
using nnarx_test::random_state;

namespace {

NnarxModel zero_weight_model(int N, int m, int p, int hidden) {
    NnarxModel model;
    model.N = N;
    model.m = m;
    model.p = p;
    model.norm = NormalizationStats::identity(m, p);
    FfnnLayer layer;
    layer.W = Eigen::MatrixXd::Zero(hidden, m);
    layer.U = Eigen::MatrixXd::Zero(hidden, (m + p) * N);
    layer.b = Eigen::VectorXd::Zero(hidden);
    layer.activation = tanh_activation();
    model.ffnn.layers.push_back(layer);
    model.ffnn.U0 = Eigen::MatrixXd::Zero(p, hidden);
    model.ffnn.b0 = Eigen::VectorXd::Zero(p);
    return model;
}

}  // namespace

TEST_SUITE_BEGIN("model");

TEST_CASE("ffnn_forward: all-zero weights and biases give zero output") {
    const auto model = zero_weight_model(2, 1, 1, 4);
    const auto x = random_state(1, 2, 1, 1);
    Eigen::VectorXd u(1);
    u << 0.7;
    CHECK(ffnn_forward(model.ffnn, x, u).isZero(0.0));
}

TEST_CASE("ffnn_forward: zero biases and zero inputs give zero (zero-centered)") {
    auto model = make_random_model(42, 2, 1, 1, {5}, -0.3);
    for (auto& L : model.ffnn.layers) L.b.setZero();
    model.ffnn.b0.setZero();
    const auto x = zero_state(2, 1, 1);
    CHECK(ffnn_forward(model.ffnn, x, Eigen::VectorXd::Zero(1)).isZero(0.0));
}

TEST_CASE("ffnn_forward matches an independent scalar evaluation") {
    // M = 1, two hidden units, hand-chosen weights, evaluated with plain
    // double arithmetic as the oracle
    NnarxModel model;
    model.N = 1;
    model.m = 1;
    model.p = 1;
    model.norm = NormalizationStats::identity(1, 1);
    FfnnLayer layer;
    layer.W = (Eigen::MatrixXd(2, 1) << 0.3, -0.2).finished();
    layer.U = (Eigen::MatrixXd(2, 2) << 0.1, 0.4, -0.5, 0.25).finished();
    layer.b = (Eigen::VectorXd(2) << 0.05, -0.15).finished();
    layer.activation = tanh_activation();
    model.ffnn.layers.push_back(layer);
    model.ffnn.U0 = (Eigen::MatrixXd(1, 2) << 0.8, -0.6).finished();
    model.ffnn.b0 = (Eigen::VectorXd(1) << 0.02).finished();
    model.validate();

    const double x1 = 0.9, x2 = -0.3, u = 0.5;
    const double h1 = std::tanh(0.3 * u + 0.1 * x1 + 0.4 * x2 + 0.05);
    const double h2 = std::tanh(-0.2 * u + (-0.5) * x1 + 0.25 * x2 - 0.15);
    const double expected = 0.8 * h1 - 0.6 * h2 + 0.02;

    Eigen::VectorXd x(2);
    x << x1, x2;
    const auto out = ffnn_forward(model.ffnn, x, Eigen::VectorXd::Constant(1, u));
    CHECK(out[0] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("ffnn_forward rejects dimension mismatches") {
    const auto model = zero_weight_model(2, 1, 1, 4);
    CHECK_THROWS_AS(ffnn_forward(model.ffnn, Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(1)),
                    InvalidArgument);
    CHECK_THROWS_AS(ffnn_forward(model.ffnn, Eigen::VectorXd::Zero(4), Eigen::VectorXd::Zero(2)),
                    InvalidArgument);
}

TEST_CASE("step: zero-weight FFNN from zero state leaves only the input block") {
    const auto model = zero_weight_model(3, 2, 1, 4);
    const auto x0 = model.zero_state();
    Eigen::VectorXd u(2);
    u << 1.5, -2.0;
    const auto [x1, y] = step(model, x0, u);
    CHECK(y.isZero(0.0));
    CHECK(x1.y_block(3).isZero(0.0));
    CHECK(x1.u_block(3) == u);
    CHECK(x1.x.head(6).isZero(0.0));
}

TEST_CASE("step: shift property holds bitwise for any model") {
    const auto model = make_random_model(7, 4, 2, 1, {6}, -0.2);
    const auto x = random_state(11, 4, 2, 1);
    Eigen::VectorXd u(2);
    u << 0.3, -0.8;
    const auto [x_next, y] = step(model, x, u);
    for (int i = 1; i <= 3; ++i) {
        CHECK(Eigen::VectorXd(x_next.y_block(i)) == Eigen::VectorXd(x.y_block(i + 1)));
        CHECK(Eigen::VectorXd(x_next.u_block(i)) == Eigen::VectorXd(x.u_block(i + 1)));
    }
    CHECK(y == x.newest_output());
}

TEST_CASE("step equals the dense canonical-matrix arithmetic") {
    const auto model = make_random_model(13, 3, 2, 2, {5, 4}, -0.1);
    const auto cm = build_canonical_matrices(model.N, model.m, model.p);
    const auto x = random_state(17, 3, 2, 2);
    Eigen::VectorXd u(2);
    u << -0.4, 0.9;

    const Eigen::VectorXd f = ffnn_forward(model.ffnn, x, u);
    const Eigen::VectorXd dense = cm.A * x.x + cm.Bu * u + cm.Bx * f;
    const Eigen::VectorXd dense_y = cm.C * x.x;

    const auto [x_next, y] = step(model, x, u);
    CHECK((x_next.x - dense).lpNorm<Eigen::Infinity>() <= 1e-14);
    CHECK((y - dense_y).lpNorm<Eigen::Infinity>() <= 1e-14);
}

TEST_CASE("C x extracts the newest stored output exactly") {
    std::vector<Eigen::VectorXd> ys = {Eigen::VectorXd::Constant(1, -1.25),
                                       Eigen::VectorXd::Constant(1, 3.5)};
    std::vector<Eigen::VectorXd> us = {Eigen::VectorXd::Constant(1, 0.0),
                                       Eigen::VectorXd::Constant(1, 1.0)};
    const auto s = stack_state(ys, us);
    const auto cm = build_canonical_matrices(2, 1, 1);
    CHECK(Eigen::VectorXd(cm.C * s.x) == s.newest_output());
    CHECK(s.newest_output()[0] == 3.5);
}

TEST_CASE("simulate_open_loop: zero model gives all-zero outputs") {
    const auto model = zero_weight_model(2, 1, 1, 3);
    Eigen::MatrixXd u = Eigen::MatrixXd::Random(10, 1);
    const auto out = simulate_open_loop(model, model.zero_state(), u);
    CHECK(out.isZero(0.0));
}

TEST_CASE("simulate_open_loop equals the fold of step") {
    const auto model = make_random_model(23, 3, 1, 1, {6}, -0.2);
    Eigen::MatrixXd u(3, 1);
    u << 0.5, -1.0, 0.25;
    const auto out = simulate_open_loop(model, model.zero_state(), u);

    StackedState x = model.zero_state();
    for (int k = 0; k < 3; ++k) {
        x = step(model, x, u.row(k).transpose()).first;
        CHECK(out.row(k).transpose() == x.newest_output());
    }
}

TEST_CASE("simulate_open_loop reports divergence with the step index") {
    const auto model = nnarx_test::make_explosive_model();
    StackedState x0 = model.zero_state();
    x0.x[0] = 1.0;
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(5000, 1);
    CHECK_THROWS_AS(simulate_open_loop(model, x0, u), NumericDivergence);
    try {
        simulate_open_loop(model, x0, u);
    } catch (const NumericDivergence& e) {
        CHECK(e.step_index > 500);  // doubling reaches overflow near 2^1024
    }
}

TEST_CASE("simulate_open_loop rejects empty input") {
    const auto model = zero_weight_model(1, 1, 1, 2);
    CHECK_THROWS_AS(simulate_open_loop(model, model.zero_state(), Eigen::MatrixXd(0, 1)),
                    InvalidArgument);
}

TEST_CASE("FFNN state-Lipschitz bound K_x holds over 1000 random draws") {
    const auto model = make_random_model(31, 3, 2, 2, {7}, -0.05);
    const double K_x = compute_constants(model.ffnn).K_x;
    Rng rng(77);
    Eigen::VectorXd u(2);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto xa = random_state(rng.next_u64(), 3, 2, 2, 2.0);
        const auto xb = random_state(rng.next_u64(), 3, 2, 2, 2.0);
        u << rng.uniform(-2, 2), rng.uniform(-2, 2);
        const double lhs = (ffnn_forward(model.ffnn, xa, u) - ffnn_forward(model.ffnn, xb, u)).norm();
        const double rhs = K_x * (xa.x - xb.x).norm();
        CHECK(lhs <= rhs * (1.0 + 1e-10) + 1e-12);
    }
}

TEST_CASE("predict_trajectory: row 0 is the initial state's output") {
    const auto model = make_random_model(41, 2, 1, 1, {4}, -0.3);
    auto x0 = random_state(43, 2, 1, 1);
    Eigen::MatrixXd u = Eigen::MatrixXd::Random(6, 1);
    const auto pred = predict_trajectory(model, x0, u);
    CHECK(pred.rows() == 6);
    CHECK(pred(0, 0) == x0.newest_output()[0]);
    // rows 1.. equal the stepwise fold that skips input row 0
    StackedState x = x0;
    for (int k = 1; k < 6; ++k) {
        x = step(model, x, u.row(k).transpose()).first;
        CHECK(pred(k, 0) == x.newest_output()[0]);
    }
}

TEST_SUITE_END();
