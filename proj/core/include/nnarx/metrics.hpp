#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "nnarx/dataset.hpp"
#include "nnarx/model.hpp"

namespace nnarx {

/// FIT = 100 (1 - ||y_pred - y_true|| / ||y_true - mean||), Euclidean norms
/// over the stacked samples with per-channel means. 100 iff the prediction
/// matches exactly; 0 for predicting the mean. Throws UndefinedDenominator
/// when y_true is constant, InvalidArgument for mismatched or too-short
/// sequences (need >= 2 samples).
double fit_index(const Eigen::MatrixXd& y_pred, const Eigen::MatrixXd& y_true);

struct TrajectoryEval {
    int trajectory_id = 0;
    double fit = 0.0;
    std::vector<double> fit_per_channel;
    double rmse = 0.0;
    double max_abs_error = 0.0;
    bool diverged = false;
};

/// Open-loop evaluation report over one dataset split. Metrics are
/// computed on denormalized (physical) signals over the post-washout
/// window; `domain` records that convention. The certificate verdict of
/// the evaluated model is echoed for convenience.
struct EvalReport {
    std::vector<TrajectoryEval> per_trajectory;
    double aggregate_fit = 0.0;
    std::vector<double> aggregate_fit_per_channel;
    double aggregate_rmse = 0.0;
    double aggregate_max_abs_error = 0.0;
    int diverged_count = 0;
    bool certified = false;
    double residual = 0.0;
    std::string domain = "denormalized";
    Split split = Split::Test;
    int washout = 0;
};

/// Simulate the model open loop from the zero state on every trajectory of
/// the split and score it. Diverged trajectories are flagged and excluded
/// from the aggregates instead of aborting the batch. `threads` > 1
/// evaluates trajectories concurrently with identical results.
EvalReport evaluate(const NnarxModel& model, const Dataset& dataset, Split split,
                    int washout, int threads = 1);

}  // namespace nnarx
