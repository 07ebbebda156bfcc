#pragma once

#include <Eigen/Dense>
#include <utility>

#include "nnarx/canonical.hpp"
#include "nnarx/ffnn.hpp"
#include "nnarx/normalization.hpp"

namespace nnarx {

/// NARX model with a feed-forward network as regression function, kept in
/// normal canonical state-space form. Immutable after construction; safe to
/// share across threads. Simulation works in normalized coordinates; `norm`
/// maps to and from physical units.
struct NnarxModel {
    FfnnParams ffnn;
    int N = 0;  // look-back horizon
    int m = 0;  // input channels
    int p = 0;  // output channels
    NormalizationStats norm;

    int state_dim() const { return (m + p) * N; }

    /// Structural validation: FFNN dimension chain, n = (m+p)N, p = rows(U0).
    /// Throws InvalidModel on violation.
    void validate() const;

    StackedState zero_state() const { return nnarx::zero_state(N, m, p); }
};

/// Advance the state one step. Returns the successor state and the output
/// stored in the *current* state (y = C x). Blocks 1..N-1 of the new state
/// equal blocks 2..N of the old one; block N is [f(x, u); u].
std::pair<StackedState, Eigen::VectorXd> step(const NnarxModel& model,
                                              const StackedState& x,
                                              const Eigen::VectorXd& u);

/// Free-running simulation: feeds each input row in turn and collects the
/// output of the state reached *after* each step, i.e. the predicted-next
/// output stream. u_seq has one m-wide row per sample; the result has one
/// p-wide row per sample. Throws NumericDivergence (with the offending step
/// index) if a non-finite value appears.
Eigen::MatrixXd simulate_open_loop(const NnarxModel& model, const StackedState& x0,
                                   const Eigen::MatrixXd& u_seq);

/// Output-Error prediction stream aligned with a recorded trajectory of T
/// samples: row 0 is the output stored in x0, row k (k >= 1) is the output
/// reached after consuming input row k, i.e. f evaluated on the simulated
/// history and the sample-k input. Input row 0 only ever enters through the
/// initial state and is not consumed. Throws NumericDivergence with the
/// offending step index.
Eigen::MatrixXd predict_trajectory(const NnarxModel& model, const StackedState& x0,
                                   const Eigen::MatrixXd& u_seq);

}  // namespace nnarx
