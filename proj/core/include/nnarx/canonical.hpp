#pragma once

#include <Eigen/Dense>
#include <vector>

namespace nnarx {

// Normal canonical state-space form of a NARX model with look-back N,
// m inputs and p outputs. The state x stacks N blocks z_1..z_N of size
// (m+p); block i holds [y-part; u-part] with the newest data in block N.
// The shift matrix A moves block i+1 into block i, the last block is
// written by the regression output and the current input.

/// Dense canonical matrices (A, B_u, B_x, C).
struct CanonicalMatrices {
    Eigen::MatrixXd A;   // n x n block shift, A^N = 0 exactly
    Eigen::MatrixXd Bu;  // n x m
    Eigen::MatrixXd Bx;  // n x p
    Eigen::MatrixXd C;   // p x n, extracts the newest stored output
    int N = 0;
    int m = 0;
    int p = 0;

    int state_dim() const { return (m + p) * N; }
};

/// Build the canonical matrices for look-back N, input width m, output
/// width p. Throws InvalidArgument for nonpositive dimensions.
CanonicalMatrices build_canonical_matrices(int N, int m, int p);

/// State of a NARX model in canonical form: N blocks of [y; u].
struct StackedState {
    Eigen::VectorXd x;
    int N = 0;
    int m = 0;
    int p = 0;

    int dim() const { return (m + p) * N; }

    /// y-part of block i, i in [1, N].
    Eigen::VectorBlock<Eigen::VectorXd> y_block(int i) {
        return x.segment((i - 1) * (m + p), p);
    }
    Eigen::VectorBlock<const Eigen::VectorXd> y_block(int i) const {
        return x.segment((i - 1) * (m + p), p);
    }
    /// u-part of block i, i in [1, N].
    Eigen::VectorBlock<Eigen::VectorXd> u_block(int i) {
        return x.segment((i - 1) * (m + p) + p, m);
    }
    Eigen::VectorBlock<const Eigen::VectorXd> u_block(int i) const {
        return x.segment((i - 1) * (m + p) + p, m);
    }

    /// Output stored in the newest block (equals C * x).
    Eigen::VectorXd newest_output() const { return y_block(N); }
};

/// All-zero state for the given dimensions.
StackedState zero_state(int N, int m, int p);

/// Build the canonical state from past outputs and inputs, ordered
/// oldest to newest (newest data lands in block N). Each past_y[i] must be
/// a p-vector, each past_u[i] an m-vector, with exactly N samples of each.
StackedState stack_state(const std::vector<Eigen::VectorXd>& past_y,
                         const std::vector<Eigen::VectorXd>& past_u);

}  // namespace nnarx
