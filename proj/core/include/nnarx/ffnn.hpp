#pragma once

#include <Eigen/Dense>
#include <vector>

#include "nnarx/activation.hpp"
#include "nnarx/canonical.hpp"

namespace nnarx {

/// One hidden layer: h_i = act(W u + U h_{i-1} + b). The first layer takes
/// the stacked state as h_0.
struct FfnnLayer {
    Eigen::MatrixXd W;  // h_i x m
    Eigen::MatrixXd U;  // h_i x h_{i-1}
    Eigen::VectorXd b;  // h_i
    Activation activation;
};

/// Feed-forward regression network: M hidden layers plus a linear output
/// layer y = U0 h_M + b0.
struct FfnnParams {
    std::vector<FfnnLayer> layers;
    Eigen::MatrixXd U0;  // p x h_M
    Eigen::VectorXd b0;  // p

    int depth() const { return static_cast<int>(layers.size()); }
    /// Width of the stacked-state input (columns of U_1).
    int state_dim() const { return static_cast<int>(layers.front().U.cols()); }
    int input_dim() const { return static_cast<int>(layers.front().W.cols()); }
    int output_dim() const { return static_cast<int>(U0.rows()); }

    /// Check the dimension chain and finiteness of all entries.
    /// Throws InvalidModel on violation.
    void validate() const;

    /// True if every weight and bias entry is finite.
    bool all_finite() const;
};

/// Evaluate the network at state x and input u.
Eigen::VectorXd ffnn_forward(const FfnnParams& params, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& u);

inline Eigen::VectorXd ffnn_forward(const FfnnParams& params, const StackedState& x,
                                    const Eigen::VectorXd& u) {
    return ffnn_forward(params, x.x, u);
}

}  // namespace nnarx
