#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nnarx/certificate.hpp"
#include "nnarx/dataset.hpp"
#include "nnarx/model.hpp"
#include "nnarx/penalty.hpp"
#include "nnarx/rmsprop.hpp"

namespace nnarx {

struct TrainConfig {
    double learning_rate = 1e-3;
    double rmsprop_decay = 0.9;
    double rmsprop_epsilon = 1e-8;
    int max_epochs = 2000;
    int washout = 20;  // T_w, simulation samples excluded from the loss
    PenaltyConfig penalty;
    int early_stopping_patience = 200;
    std::uint64_t seed = 0;
    std::optional<double> clip_norm = 1.0;
};

/// Shape of the model to initialize: hidden widths (one per layer) and
/// activation names (one per layer, or a single name broadcast to all).
/// Weights are drawn uniform in [-r, r] with r scaled so that the initial
/// weight product sits at init_weight_ratio times the certificate
/// threshold, i.e. the initial model is certified.
struct ModelInitSpec {
    int look_back = 4;
    int input_dim = 1;
    int output_dim = 1;
    std::vector<int> hidden_widths = {10};
    std::vector<std::string> activations = {"tanh"};
    double init_weight_ratio = 0.5;
};

NnarxModel init_model(const ModelInitSpec& spec, const NormalizationStats& norm,
                      std::uint64_t seed);

/// Simulation-error loss of one (already normalized) trajectory with
/// washout, in Output-Error fashion from init_state, plus the stability
/// penalty rho(nu). Exactly T - washout residuals enter, rows
/// washout..T-1 of the prediction stream, and the divisor is T - washout.
double loss(const NnarxModel& model, const Trajectory& trajectory, int washout,
            const PenaltyConfig& penalty, const StackedState& init_state);

struct EpochRecord {
    int epoch = 0;  // 1-based
    double train_loss = 0.0;
    double val_error = 0.0;  // mean simulation MSE on validation, no penalty
    double nu = 0.0;
    bool certified = false;
    double wall_seconds = 0.0;  // not serialized; timing only
};

struct TrainHistory {
    std::vector<EpochRecord> records;
    int best_epoch = 0;  // 1-based; 0 = no epoch ran
};

struct TrainResult {
    NnarxModel model;  // parameters of the best validation epoch
    TrainHistory history;
    CertificateReport certificate;
};

/// Train on the dataset's training split with single trajectories as
/// batches in seeded-shuffled order, evaluating validation simulation
/// error each epoch, with early stopping on validation stagnation.
/// `threads` > 1 parallelizes the validation evaluations only; results are
/// identical to the single-threaded run.
TrainResult train(const Dataset& dataset, const ModelInitSpec& init_spec,
                  const TrainConfig& cfg, int threads = 1);

}  // namespace nnarx
