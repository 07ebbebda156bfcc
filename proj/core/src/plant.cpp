#include "nnarx/plant.hpp"

#include <cmath>
#include <functional>

#include "nnarx/errors.hpp"

namespace nnarx {

Eigen::VectorXd rk4_step(const ContinuousPlant& plant, const Eigen::VectorXd& state,
                         double u, double dt) {
    const Eigen::VectorXd k1 = plant.derivative(state, u);
    const Eigen::VectorXd k2 = plant.derivative(state + 0.5 * dt * k1, u);
    const Eigen::VectorXd k3 = plant.derivative(state + 0.5 * dt * k2, u);
    const Eigen::VectorXd k4 = plant.derivative(state + dt * k3, u);
    return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Rk4Plant::Rk4Plant(std::shared_ptr<const ContinuousPlant> plant, double sampling_time,
                   int inner_steps)
    : plant_(std::move(plant)), sampling_time_(sampling_time), inner_steps_(inner_steps) {
    if (!plant_) throw InvalidArgument("Rk4Plant: null plant");
    if (!(sampling_time_ > 0.0)) throw InvalidArgument("Rk4Plant: sampling time must be positive");
    if (inner_steps_ < 1) throw InvalidArgument("Rk4Plant: inner steps must be >= 1");
}

std::string Rk4Plant::name() const { return plant_->name(); }
int Rk4Plant::state_dim() const { return plant_->state_dim(); }
std::pair<double, double> Rk4Plant::input_range() const { return plant_->input_range(); }

std::pair<Eigen::VectorXd, double> Rk4Plant::step(const Eigen::VectorXd& state,
                                                  double u) const {
    const double dt = sampling_time_ / inner_steps_;
    Eigen::VectorXd x = state;
    for (int i = 0; i < inner_steps_; ++i) {
        x = rk4_step(*plant_, x, u, dt);
    }
    if (!x.allFinite()) {
        throw NumericDivergence("Rk4Plant: non-finite state after integration", 0);
    }
    return {x, plant_->output(x, u)};
}

std::pair<Eigen::Vector2d, double> surrogate_plant_step(const Eigen::Vector2d& state,
                                                        double u) {
    if (!state.allFinite() || !std::isfinite(u)) {
        throw InvalidArgument("surrogate_plant_step: non-finite state or input");
    }
    const double s1 = state[0];
    const double s2 = state[1];
    const double s2_next = (s1 * s2 * (s2 + 2.5)) / (1.0 + s1 * s1 + s2 * s2) + u;
    Eigen::Vector2d next(s2, s2_next);
    return {next, s2_next};
}

std::pair<Eigen::VectorXd, double> SurrogatePlant::step(const Eigen::VectorXd& state,
                                                        double u) const {
    if (state.size() != 2) {
        throw InvalidArgument("SurrogatePlant: state must be a 2-vector");
    }
    auto [next, y] = surrogate_plant_step(Eigen::Vector2d(state[0], state[1]), u);
    return {Eigen::VectorXd(next), y};
}

namespace {

// Damped Newton with a central finite-difference Jacobian on a generic
// residual map.
Eigen::VectorXd newton_solve(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual,
                             Eigen::VectorXd x, double tol, int max_iter,
                             const char* who) {
    const double fd_step = 1e-7;
    Eigen::VectorXd r = residual(x);
    double rn = r.norm();
    for (int it = 0; it < max_iter; ++it) {
        if (rn < tol) return x;
        const Eigen::Index n = x.size();
        Eigen::MatrixXd J(n, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            Eigen::VectorXd xp = x, xm = x;
            xp[j] += fd_step;
            xm[j] -= fd_step;
            J.col(j) = (residual(xp) - residual(xm)) / (2.0 * fd_step);
        }
        Eigen::VectorXd delta = J.fullPivLu().solve(-r);
        if (!delta.allFinite()) {
            throw ConvergenceFailure(std::string(who) + ": singular Jacobian", rn);
        }
        // backtracking damping
        double alpha = 1.0;
        for (int back = 0; back < 30; ++back) {
            Eigen::VectorXd x_try = x + alpha * delta;
            Eigen::VectorXd r_try = residual(x_try);
            const double rn_try = r_try.norm();
            if (std::isfinite(rn_try) && rn_try < rn) {
                x = std::move(x_try);
                r = std::move(r_try);
                rn = rn_try;
                break;
            }
            alpha *= 0.5;
            if (back == 29) {
                throw ConvergenceFailure(std::string(who) + ": line search stalled", rn);
            }
        }
    }
    if (rn < tol) return x;
    throw ConvergenceFailure(std::string(who) + ": no convergence within iteration cap", rn);
}

}  // namespace

Eigen::VectorXd find_equilibrium(const ContinuousPlant& plant, double u,
                                 const Eigen::VectorXd& initial_guess, double tol,
                                 int max_iter) {
    if (initial_guess.size() != plant.state_dim()) {
        throw InvalidArgument("find_equilibrium: guess has wrong dimension");
    }
    return newton_solve([&](const Eigen::VectorXd& x) { return plant.derivative(x, u); },
                        initial_guess, tol, max_iter, "find_equilibrium");
}

Eigen::VectorXd find_equilibrium(const DiscretePlant& plant, double u,
                                 const Eigen::VectorXd& initial_guess, double tol,
                                 int max_iter) {
    if (initial_guess.size() != plant.state_dim()) {
        throw InvalidArgument("find_equilibrium: guess has wrong dimension");
    }
    return newton_solve(
        [&](const Eigen::VectorXd& x) {
            return Eigen::VectorXd(plant.step(x, u).first - x);
        },
        initial_guess, tol, max_iter, "find_equilibrium");
}

}  // namespace nnarx
