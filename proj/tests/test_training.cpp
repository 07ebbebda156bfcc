#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "nnarx/certificate.hpp"
#include "nnarx/errors.hpp"
#include "nnarx/gradients.hpp"
#include "nnarx/rmsprop.hpp"
#include "nnarx/training.hpp"
#include "test_helpers.hpp"

using namespace nnarx;
using nnarx_test::make_random_model;
using nnarx_test::random_state;

namespace {

Trajectory random_trajectory(std::uint64_t seed, int T, int m, int p) {
    Rng rng(seed);
    Trajectory t;
    t.u.resize(T, m);
    t.y.resize(T, p);
    for (int k = 0; k < T; ++k) {
        for (int c = 0; c < m; ++c) t.u(k, c) = rng.uniform(-1, 1);
        for (int c = 0; c < p; ++c) t.y(k, c) = rng.uniform(-1, 1);
    }
    return t;
}

// visit every scalar parameter of the network
void for_each_param(NnarxModel& model, const std::function<void(double&)>& visit) {
    for (auto& L : model.ffnn.layers) {
        for (Eigen::Index i = 0; i < L.W.size(); ++i) visit(L.W.data()[i]);
        for (Eigen::Index i = 0; i < L.U.size(); ++i) visit(L.U.data()[i]);
        for (Eigen::Index i = 0; i < L.b.size(); ++i) visit(L.b.data()[i]);
    }
    for (Eigen::Index i = 0; i < model.ffnn.U0.size(); ++i) visit(model.ffnn.U0.data()[i]);
    for (Eigen::Index i = 0; i < model.ffnn.b0.size(); ++i) visit(model.ffnn.b0.data()[i]);
}

std::vector<double> flatten(const ParamTensors& g) {
    std::vector<double> out;
    for (const auto& L : g.layers) {
        out.insert(out.end(), L.W.data(), L.W.data() + L.W.size());
        out.insert(out.end(), L.U.data(), L.U.data() + L.U.size());
        out.insert(out.end(), L.b.data(), L.b.data() + L.b.size());
    }
    out.insert(out.end(), g.U0.data(), g.U0.data() + g.U0.size());
    out.insert(out.end(), g.b0.data(), g.b0.data() + g.b0.size());
    return out;
}

// batch-mean loss evaluated from scratch, the quantity `gradients`
// differentiates
double batch_loss(const NnarxModel& model, const std::vector<Trajectory>& batch,
                  const std::vector<StackedState>& inits, int washout,
                  const PenaltyConfig& penalty) {
    if (batch.empty()) {
        return penalty_rho(stability_residual(model), penalty);
    }
    double acc = 0.0;
    const PenaltyConfig none{0.0, 0.0};
    for (std::size_t i = 0; i < batch.size(); ++i) {
        acc += loss(model, batch[i], washout, none, inits[i]);
    }
    return acc / static_cast<double>(batch.size()) +
           penalty_rho(stability_residual(model), penalty);
}

}  // namespace

TEST_SUITE_BEGIN("training");

TEST_CASE("penalty_rho: inactive, active and kink") {
    PenaltyConfig cfg{10.0, 0.05};
    CHECK(penalty_rho(-1.0, cfg) == 0.0);
    CHECK(penalty_rho(0.1, cfg) == doctest::Approx(1.5).epsilon(1e-12));
    // continuity at the kink
    CHECK(penalty_rho(-0.05, cfg) == 0.0);
    CHECK(penalty_rho(-0.05 + 1e-12, cfg) == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
    // nondecreasing
    double prev = -1.0;
    for (double nu = -0.2; nu <= 0.2; nu += 0.01) {
        const double r = penalty_rho(nu, cfg);
        CHECK(r >= prev);
        prev = r;
    }
}

TEST_CASE("loss: model reproducing the data exactly scores zero") {
    const auto model = make_random_model(21, 2, 1, 1, {4}, -0.3);
    const auto init = random_state(22, 2, 1, 1);
    Trajectory traj = random_trajectory(23, 30, 1, 1);
    traj.y = predict_trajectory(model, init, traj.u);  // data from the model itself
    PenaltyConfig penalty{10.0, 0.01};                 // nu = -0.3 <= -margin
    CHECK(loss(model, traj, 5, penalty, init) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
}

TEST_CASE("loss: zero-weight model leaves the mean square of y") {
    NnarxModel model;
    model.N = 2;
    model.m = 1;
    model.p = 1;
    model.norm = NormalizationStats::identity(1, 1);
    FfnnLayer layer;
    layer.W = Eigen::MatrixXd::Zero(3, 1);
    layer.U = Eigen::MatrixXd::Zero(3, 4);
    layer.b = Eigen::VectorXd::Zero(3);
    layer.activation = tanh_activation();
    model.ffnn.layers.push_back(layer);
    model.ffnn.U0 = Eigen::MatrixXd::Zero(1, 3);
    model.ffnn.b0 = Eigen::VectorXd::Zero(1);

    const Trajectory traj = random_trajectory(25, 40, 1, 1);
    const int washout = 8;
    const double expected =
        traj.y.bottomRows(40 - washout).squaredNorm() / (40.0 - washout);
    PenaltyConfig no_penalty{0.0, 0.0};
    CHECK(loss(model, traj, washout, no_penalty, model.zero_state()) ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("loss matches a hand-rolled loop oracle") {
    // independent accumulation: explicit scalar network evaluation and
    // explicit state shifting, no library simulation involved
    const auto model = make_random_model(27, 2, 1, 1, {3}, -0.2);
    const auto init = random_state(28, 2, 1, 1);
    const Trajectory traj = random_trajectory(29, 15, 1, 1);
    const int T = 15, washout = 3;

    const auto& L = model.ffnn.layers[0];
    std::vector<double> x(init.x.data(), init.x.data() + 4);
    double acc = 0.0;
    for (int k = 0; k < T; ++k) {
        double yhat;
        if (k == 0) {
            yhat = x[2];  // y-part of block N for N=2, m=p=1
        } else {
            const double u = traj.u(k, 0);
            double out = model.ffnn.b0[0];
            for (int j = 0; j < 3; ++j) {
                double v = L.W(j, 0) * u + L.b[j];
                for (int i = 0; i < 4; ++i) v += L.U(j, i) * x[static_cast<std::size_t>(i)];
                out += model.ffnn.U0(0, j) * std::tanh(v);
            }
            yhat = out;
            x[0] = x[2];
            x[1] = x[3];
            x[2] = out;
            x[3] = u;
        }
        if (k >= washout) {
            const double e = yhat - traj.y(k, 0);
            acc += e * e;
        }
    }
    acc /= (T - washout);

    PenaltyConfig no_penalty{0.0, 0.0};
    CHECK(loss(model, traj, washout, no_penalty, init) ==
          doctest::Approx(acc).epsilon(1e-12));
}

TEST_CASE("rmsprop: zero gradient leaves parameters unchanged, decays v") {
    auto model = make_random_model(31, 2, 1, 1, {3}, -0.2);
    auto state = RmspropState::init(model.ffnn);
    RmspropConfig cfg{0.01, 0.9, 1e-8, std::nullopt};

    // seed v with one nonzero step
    auto g = ParamTensors::zeros_like(model.ffnn);
    g.b0[0] = 2.0;
    rmsprop_step(model.ffnn, g, state, cfg);
    const double v_before = state.v.b0[0];
    CHECK(v_before > 0.0);

    const auto params_before = model.ffnn;
    rmsprop_step(model.ffnn, ParamTensors::zeros_like(model.ffnn), state, cfg);
    CHECK(model.ffnn.b0 == params_before.b0);
    CHECK(model.ffnn.U0 == params_before.U0);
    CHECK(model.ffnn.layers[0].U == params_before.layers[0].U);
    CHECK(state.v.b0[0] == doctest::Approx(0.9 * v_before).epsilon(1e-15));
}

TEST_CASE("rmsprop: first scalar step has the closed form") {
    auto model = make_random_model(33, 1, 1, 1, {1}, -0.5);
    const double theta0 = model.ffnn.b0[0];
    auto state = RmspropState::init(model.ffnn);
    RmspropConfig cfg{0.05, 0.9, 1e-8, std::nullopt};
    auto g = ParamTensors::zeros_like(model.ffnn);
    g.b0[0] = 0.7;
    rmsprop_step(model.ffnn, g, state, cfg);
    const double expected =
        theta0 - 0.05 * 0.7 / (std::sqrt(0.1 * 0.7 * 0.7) + 1e-8);
    CHECK(model.ffnn.b0[0] == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("rmsprop: 3-step scalar run matches the hand recursion") {
    auto model = make_random_model(35, 1, 1, 1, {1}, -0.5);
    auto state = RmspropState::init(model.ffnn);
    RmspropConfig cfg{0.1, 0.9, 1e-8, std::nullopt};
    const double gs[3] = {0.5, -0.2, 0.1};

    // independent plain-double recursion
    double theta = model.ffnn.b0[0];
    double v = 0.0;
    for (double g : gs) {
        v = 0.9 * v + 0.1 * g * g;
        theta -= 0.1 * g / (std::sqrt(v) + 1e-8);
    }

    for (double g : gs) {
        auto grads = ParamTensors::zeros_like(model.ffnn);
        grads.b0[0] = g;
        rmsprop_step(model.ffnn, grads, state, cfg);
    }
    CHECK(model.ffnn.b0[0] == doctest::Approx(theta).epsilon(1e-12));
}

TEST_CASE("rmsprop: global norm clipping rescales the step") {
    auto model_a = make_random_model(37, 1, 1, 1, {1}, -0.5);
    auto model_b = model_a;
    auto state_a = RmspropState::init(model_a.ffnn);
    auto state_b = RmspropState::init(model_b.ffnn);

    auto g = ParamTensors::zeros_like(model_a.ffnn);
    g.b0[0] = 3.0;
    g.U0(0, 0) = 4.0;  // global norm 5

    RmspropConfig clipped{0.1, 0.9, 1e-8, 1.0};
    rmsprop_step(model_a.ffnn, g, state_a, clipped);

    auto g_scaled = g;
    g_scaled.scale(1.0 / 5.0);
    RmspropConfig unclipped{0.1, 0.9, 1e-8, std::nullopt};
    rmsprop_step(model_b.ffnn, g_scaled, state_b, unclipped);

    CHECK(model_a.ffnn.b0[0] == doctest::Approx(model_b.ffnn.b0[0]).epsilon(1e-14));
    CHECK(model_a.ffnn.U0(0, 0) == doctest::Approx(model_b.ffnn.U0(0, 0)).epsilon(1e-14));
}

TEST_CASE("gradients: zero at a data-interpolating optimum") {
    const auto model = make_random_model(41, 2, 1, 1, {4}, -0.4);
    const auto init = random_state(42, 2, 1, 1);
    Trajectory traj = random_trajectory(43, 25, 1, 1);
    traj.y = predict_trajectory(model, init, traj.u);
    PenaltyConfig no_penalty{0.0, 0.0};
    const auto bg = gradients(model, {traj}, {init}, 4, no_penalty);
    CHECK(bg.grads.global_norm() < 1e-8);
    CHECK(bg.loss == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
}

TEST_CASE("gradients match central finite differences") {
    struct Config {
        std::uint64_t seed;
        int N, m, p;
        std::vector<int> widths;
        double target_nu;
        PenaltyConfig penalty;
    };
    // one hinge-active configuration and one safely inactive
    const std::vector<Config> configs = {
        {51, 2, 1, 1, {3}, -0.30, {0.0, 0.0}},
        {52, 2, 1, 1, {4}, +0.20, {2.0, 0.05}},  // penalty active, away from the kink
    };
    for (const auto& c : configs) {
        auto model = make_random_model(c.seed, c.N, c.m, c.p, c.widths, c.target_nu);
        const std::vector<Trajectory> batch = {random_trajectory(c.seed + 1, 20, c.m, c.p),
                                               random_trajectory(c.seed + 2, 20, c.m, c.p)};
        const std::vector<StackedState> inits = {
            random_state(c.seed + 3, c.N, c.m, c.p),
            random_state(c.seed + 4, c.N, c.m, c.p)};
        const int washout = 3;

        const auto analytic = flatten(gradients(model, batch, inits, washout, c.penalty).grads);

        std::vector<double> fd;
        const double h = 1e-5;
        for_each_param(model, [&](double& theta) {
            const double orig = theta;
            theta = orig + h;
            const double up = batch_loss(model, batch, inits, washout, c.penalty);
            theta = orig - h;
            const double down = batch_loss(model, batch, inits, washout, c.penalty);
            theta = orig;
            fd.push_back((up - down) / (2.0 * h));
        });

        REQUIRE(fd.size() == analytic.size());
        for (std::size_t i = 0; i < fd.size(); ++i) {
            const double scale = std::max({std::abs(fd[i]), std::abs(analytic[i]), 1e-7});
            CHECK(std::abs(fd[i] - analytic[i]) / scale <= 1e-4);
        }
    }
}

TEST_CASE("penalty-only gradient descends the residual") {
    auto model = make_random_model(61, 3, 1, 1, {5}, +0.15);
    PenaltyConfig penalty{1.0, 0.0};
    const auto bg = gradients(model, {}, {}, 0, penalty);
    const double nu0 = bg.residual;
    CHECK(nu0 > 0.0);
    CHECK(bg.grads.global_norm() > 0.0);

    // small step along the negative gradient strictly decreases nu
    const double eta = 1e-3 / bg.grads.global_norm();
    std::size_t li = 0;
    for (auto& L : model.ffnn.layers) {
        L.W -= eta * bg.grads.layers[li].W;
        L.U -= eta * bg.grads.layers[li].U;
        L.b -= eta * bg.grads.layers[li].b;
        ++li;
    }
    model.ffnn.U0 -= eta * bg.grads.U0;
    model.ffnn.b0 -= eta * bg.grads.b0;
    CHECK(stability_residual(model) < nu0);
}

TEST_CASE("gradients validate their inputs") {
    const auto model = make_random_model(71, 2, 1, 1, {3}, -0.2);
    const Trajectory traj = random_trajectory(72, 10, 1, 1);
    CHECK_THROWS_AS(gradients(model, {traj}, {}, 2, PenaltyConfig{}), InvalidArgument);
    CHECK_THROWS_AS(
        gradients(model, {traj}, {random_state(73, 2, 1, 1)}, 10, PenaltyConfig{}),
        InvalidArgument);
}

TEST_SUITE_END();
