#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nnarx/dataset.hpp"
#include "nnarx/metrics.hpp"
#include "nnarx/probes.hpp"
#include "nnarx/training.hpp"

namespace nnarx {

/// Full experiment description: plant, excitation, dataset sizes, model
/// shape, training hyperparameters, output directory and the master seed
/// every random stream derives from. Round-trips losslessly through JSON.
struct ExperimentConfig {
    std::string plant = "surrogate";  // "surrogate" or "ph"
    std::string ph_params_path;       // required when plant == "ph"

    ExcitationConfig excitation{{-1.0, -0.6, -0.2, 0.2, 0.6, 1.0}, 5, 20};
    int n_train = 10;
    int n_val = 3;
    int n_test = 1;
    int trajectory_length = 1250;
    std::optional<double> noise_std_u;  // unset = noise_fraction of max deviation
    std::optional<double> noise_std_y;
    double noise_fraction = 0.01;
    double sampling_time = 1.0;
    double init_state_span = 0.5;
    std::vector<double> init_state_nominal;  // empty = zeros

    int look_back = 4;
    std::vector<int> hidden_widths = {10};
    std::vector<std::string> activations = {"tanh"};
    double init_weight_ratio = 0.5;

    TrainConfig train;

    std::string output_dir = "out";
    std::uint64_t master_seed = 1;
    int threads = 1;

    void validate() const;  // throws ConfigError
};

ExperimentConfig load_experiment_config(const std::filesystem::path& path);
void save_experiment_config(const std::filesystem::path& path, const ExperimentConfig& cfg);

/// Derived per-stage seeds (documented derivation from the master seed).
std::uint64_t dataset_seed(const ExperimentConfig& cfg);
std::uint64_t training_seed(const ExperimentConfig& cfg);

/// generate: build the dataset and write it under output_dir/dataset.
/// Returns the manifest path.
std::filesystem::path run_generate(const ExperimentConfig& cfg);

struct TrainArtifacts {
    std::filesystem::path model_path;
    std::filesystem::path history_path;
    std::filesystem::path certificate_path;
    TrainResult result;
};

/// train: fit the configured model on the dataset behind `manifest` and
/// write model.json, history.csv and certificate.json under output_dir.
TrainArtifacts run_train(const ExperimentConfig& cfg,
                         const std::filesystem::path& manifest);

struct EvalArtifacts {
    std::filesystem::path report_csv;
    std::filesystem::path summary_json;
    std::vector<std::filesystem::path> plot_files;
    EvalReport report;
};

/// evaluate: score a stored model on one split of a stored dataset and
/// write report.csv, summary.json and per-trajectory plot data.
EvalArtifacts run_evaluate(const ExperimentConfig& cfg,
                           const std::filesystem::path& model_path,
                           const std::filesystem::path& manifest, Split split);

struct ProbeOptions {
    int horizon = 200;
    std::uint64_t seed = 7;
    double offset_scale = 1.0;  // initial state distance scale
    std::filesystem::path output = "probe.csv";
};

struct ProbeArtifacts {
    std::filesystem::path trace_csv;
    ContractionTrace trace;
    double ratio = 0.0;  // final distance / initial distance
};

/// probe: run the contraction probe on a stored model with a seeded MPRS
/// input and random initial-state pair, and write the distance trace.
ProbeArtifacts run_probe(const std::filesystem::path& model_path, const ProbeOptions& opts);

}  // namespace nnarx
