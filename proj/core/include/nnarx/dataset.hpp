#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nnarx/normalization.hpp"
#include "nnarx/plant.hpp"

namespace nnarx {

/// One recorded input/output trajectory, one row per sample.
struct Trajectory {
    Eigen::MatrixXd u;  // T x m
    Eigen::MatrixXd y;  // T x p

    Eigen::Index length() const { return u.rows(); }
};

enum class Split { Train, Val, Test };

const char* to_string(Split split);
Split split_from_string(const std::string& name);

struct DatasetTrajectory {
    int id = 0;
    Split split = Split::Train;
    std::uint64_t seed = 0;
    Trajectory data;
};

/// Excitation template shared by all trajectories of a dataset; the
/// per-trajectory seed and length are derived when the dataset is built.
struct ExcitationConfig {
    std::vector<double> levels;
    int hold_min = 5;
    int hold_max = 20;
};

/// Identification dataset: trajectories with split labels, the sampling
/// time, normalization statistics computed from the training split only,
/// and the provenance needed to regenerate it.
struct Dataset {
    std::vector<DatasetTrajectory> trajectories;
    double sampling_time = 1.0;
    NormalizationStats norm;

    // provenance
    std::string plant_name;
    double noise_std_u = 0.0;
    double noise_std_y = 0.0;
    std::uint64_t master_seed = 0;
    ExcitationConfig excitation;
    int trajectory_length = 0;

    std::vector<const DatasetTrajectory*> split_view(Split split) const;
    int count(Split split) const;
};

struct DatasetBuildConfig {
    int n_train = 10;
    int n_val = 3;
    int n_test = 0;
    int trajectory_length = 1250;
    ExcitationConfig excitation;
    /// Measurement-noise standard deviations. When unset, each defaults to
    /// noise_fraction times the clean training split's maximum deviation of
    /// that channel. The plant always sees the noiseless input.
    std::optional<double> noise_std_u;
    std::optional<double> noise_std_y;
    double noise_fraction = 0.01;
    std::uint64_t seed = 0;
    double sampling_time = 1.0;
    /// Initial plant state: nominal + componentwise uniform(-span, span).
    double init_state_span = 1.0;
    Eigen::VectorXd init_state_nominal;  // empty = zeros
};

/// Simulate, excite, perturb and split. Throws ConfigError for impossible
/// counts and NormalizationError for zero-variance channels.
Dataset build_dataset(const DiscretePlant& plant, const DatasetBuildConfig& cfg);

}  // namespace nnarx
