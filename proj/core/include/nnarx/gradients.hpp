#pragma once

#include <Eigen/Dense>
#include <vector>

#include "nnarx/canonical.hpp"
#include "nnarx/dataset.hpp"
#include "nnarx/ffnn.hpp"
#include "nnarx/model.hpp"
#include "nnarx/penalty.hpp"
#include "nnarx/spectral.hpp"

namespace nnarx {

/// Parameter-shaped tensor set: one entry per W_i, U_i, b_i plus the output
/// layer. Used for gradients and optimizer accumulators.
struct LayerTensors {
    Eigen::MatrixXd W, U;
    Eigen::VectorXd b;
};

struct ParamTensors {
    std::vector<LayerTensors> layers;
    Eigen::MatrixXd U0;
    Eigen::VectorXd b0;

    static ParamTensors zeros_like(const FfnnParams& params);

    double squared_norm() const;
    double global_norm() const;
    void scale(double factor);
    bool all_finite() const;
};

struct BatchGradients {
    ParamTensors grads;
    double loss = 0.0;      // batch-mean loss including the penalty
    double residual = 0.0;  // nu at the evaluated parameters
};

/// Exact reverse-mode gradient of the batch-mean loss through the unrolled
/// open-loop simulation (backpropagation through time over the full
/// trajectory), including the penalty subgradient through the spectral
/// norms. Trajectories must be normalized already; init_states supplies one
/// simulation start state per trajectory. An empty batch yields the
/// penalty-only gradient. Throws NumericDivergence if a forward pass blows
/// up.
BatchGradients gradients(const NnarxModel& model, const std::vector<Trajectory>& batch,
                         const std::vector<StackedState>& init_states, int washout,
                         const PenaltyConfig& penalty, double tol = kSpectralTol);

}  // namespace nnarx
