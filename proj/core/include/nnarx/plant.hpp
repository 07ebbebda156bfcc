#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <utility>

namespace nnarx {

/// Discrete-time SISO benchmark plant. Deterministic: the same state and
/// input always produce the same successor and output.
class DiscretePlant {
public:
    virtual ~DiscretePlant() = default;
    virtual std::string name() const = 0;
    virtual int state_dim() const = 0;
    /// Admissible input range [lo, hi].
    virtual std::pair<double, double> input_range() const = 0;
    /// Advance one sample; returns (next state, measured output).
    virtual std::pair<Eigen::VectorXd, double> step(const Eigen::VectorXd& state,
                                                    double u) const = 0;
};

/// Continuous-time SISO plant described by a derivative map and an output
/// map; discretize with Rk4Plant to use it as a benchmark.
class ContinuousPlant {
public:
    virtual ~ContinuousPlant() = default;
    virtual std::string name() const = 0;
    virtual int state_dim() const = 0;
    virtual std::pair<double, double> input_range() const = 0;
    virtual Eigen::VectorXd derivative(const Eigen::VectorXd& state, double u) const = 0;
    virtual double output(const Eigen::VectorXd& state, double u) const = 0;
};

/// One classic fourth-order Runge-Kutta step of size dt under constant u.
Eigen::VectorXd rk4_step(const ContinuousPlant& plant, const Eigen::VectorXd& state,
                         double u, double dt);

/// Fixed-step RK4 discretization of a continuous plant: each sample
/// integrates `inner_steps` sub-steps of size sampling_time/inner_steps and
/// outputs the plant's output map at the reached state.
class Rk4Plant final : public DiscretePlant {
public:
    Rk4Plant(std::shared_ptr<const ContinuousPlant> plant, double sampling_time,
             int inner_steps = 10);

    std::string name() const override;
    int state_dim() const override;
    std::pair<double, double> input_range() const override;
    std::pair<Eigen::VectorXd, double> step(const Eigen::VectorXd& state,
                                            double u) const override;

private:
    std::shared_ptr<const ContinuousPlant> plant_;
    double sampling_time_;
    int inner_steps_;
};

/// Bounded discrete nonlinear SISO benchmark:
///   s1+ = s2,  s2+ = s1 s2 (s2 + 2.5) / (1 + s1^2 + s2^2) + u,  y = s2+.
/// The rational term saturates, so rollouts stay bounded for |u| <= 2.
std::pair<Eigen::Vector2d, double> surrogate_plant_step(const Eigen::Vector2d& state,
                                                        double u);

class SurrogatePlant final : public DiscretePlant {
public:
    std::string name() const override { return "surrogate"; }
    int state_dim() const override { return 2; }
    std::pair<double, double> input_range() const override { return {-2.0, 2.0}; }
    std::pair<Eigen::VectorXd, double> step(const Eigen::VectorXd& state,
                                            double u) const override;
};

/// Solve derivative(x, u) = 0 by damped Newton iteration with a
/// finite-difference Jacobian. Throws ConvergenceFailure (carrying the
/// final residual norm) if the residual does not drop below tol within
/// max_iter iterations.
Eigen::VectorXd find_equilibrium(const ContinuousPlant& plant, double u,
                                 const Eigen::VectorXd& initial_guess,
                                 double tol = 1e-10, int max_iter = 200);

/// Fixed point of the discrete map: solves step(x, u).state - x = 0.
Eigen::VectorXd find_equilibrium(const DiscretePlant& plant, double u,
                                 const Eigen::VectorXd& initial_guess,
                                 double tol = 1e-10, int max_iter = 200);

}  // namespace nnarx
