#include "nnarx/dataset.hpp"

#include <cmath>
#include <string>

#include "nnarx/errors.hpp"
#include "nnarx/mprs.hpp"
#include "nnarx/rng.hpp"

namespace nnarx {

const char* to_string(Split split) {
    switch (split) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
    }
    return "?";
}

Split split_from_string(const std::string& name) {
    if (name == "train") return Split::Train;
    if (name == "val") return Split::Val;
    if (name == "test") return Split::Test;
    throw SchemaError("unknown split label: " + name);
}

std::vector<const DatasetTrajectory*> Dataset::split_view(Split split) const {
    std::vector<const DatasetTrajectory*> view;
    for (const DatasetTrajectory& t : trajectories) {
        if (t.split == split) view.push_back(&t);
    }
    return view;
}

int Dataset::count(Split split) const {
    return static_cast<int>(split_view(split).size());
}

namespace {

struct CleanTrajectory {
    Eigen::VectorXd u;
    Eigen::VectorXd y;
    std::uint64_t seed = 0;
};

CleanTrajectory simulate_one(const DiscretePlant& plant, const DatasetBuildConfig& cfg,
                             std::uint64_t traj_seed) {
    MprsConfig mprs;
    mprs.levels = cfg.excitation.levels;
    mprs.hold_min = cfg.excitation.hold_min;
    mprs.hold_max = cfg.excitation.hold_max;
    mprs.length = cfg.trajectory_length;
    mprs.seed = derive_seed(traj_seed, "mprs");

    CleanTrajectory out;
    out.seed = traj_seed;
    out.u = mprs_generate(mprs);
    out.y.resize(cfg.trajectory_length);

    Eigen::VectorXd x;
    if (cfg.init_state_nominal.size() > 0) {
        if (cfg.init_state_nominal.size() != plant.state_dim()) {
            throw ConfigError("build_dataset: init_state_nominal has wrong dimension");
        }
        x = cfg.init_state_nominal;
    } else {
        x = Eigen::VectorXd::Zero(plant.state_dim());
    }
    Rng init_rng(derive_seed(traj_seed, "init"));
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        x[i] += init_rng.uniform(-cfg.init_state_span, cfg.init_state_span);
    }

    for (int k = 0; k < cfg.trajectory_length; ++k) {
        auto [next, y] = plant.step(x, out.u[k]);
        x = std::move(next);
        out.y[k] = y;
    }
    return out;
}

double max_abs_deviation(const std::vector<const Eigen::VectorXd*>& columns) {
    double total = 0.0;
    Eigen::Index count = 0;
    for (const auto* c : columns) {
        total += c->sum();
        count += c->size();
    }
    const double mean = total / static_cast<double>(count);
    double dev = 0.0;
    for (const auto* c : columns) {
        dev = std::max(dev, (c->array() - mean).abs().maxCoeff());
    }
    return dev;
}

}  // namespace

Dataset build_dataset(const DiscretePlant& plant, const DatasetBuildConfig& cfg) {
    if (cfg.n_train < 0 || cfg.n_val < 0 || cfg.n_test < 0) {
        throw ConfigError("build_dataset: split counts must be nonnegative");
    }
    const int total = cfg.n_train + cfg.n_val + cfg.n_test;
    if (total < 1) {
        throw ConfigError("build_dataset: at least one trajectory required");
    }
    if (cfg.trajectory_length < 2) {
        throw ConfigError("build_dataset: trajectories need at least two samples");
    }
    if (!(cfg.sampling_time > 0.0)) {
        throw ConfigError("build_dataset: sampling time must be positive");
    }

    // pass 1: clean simulations, per-trajectory seeds derived from the master
    std::vector<CleanTrajectory> clean;
    clean.reserve(static_cast<std::size_t>(total));
    for (int i = 0; i < total; ++i) {
        clean.push_back(simulate_one(plant, cfg, derive_seed(cfg.seed, "trajectory",
                                                             static_cast<std::uint64_t>(i))));
    }

    // default noise: a fraction of the clean training split's max deviation
    std::vector<const Eigen::VectorXd*> train_u, train_y;
    for (int i = 0; i < cfg.n_train; ++i) {
        train_u.push_back(&clean[static_cast<std::size_t>(i)].u);
        train_y.push_back(&clean[static_cast<std::size_t>(i)].y);
    }
    double std_u = cfg.noise_std_u.value_or(0.0);
    double std_y = cfg.noise_std_y.value_or(0.0);
    if (!cfg.noise_std_u.has_value() || !cfg.noise_std_y.has_value()) {
        if (cfg.n_train < 1) {
            throw ConfigError("build_dataset: defaulted noise levels require a training split");
        }
        if (!cfg.noise_std_u.has_value()) std_u = cfg.noise_fraction * max_abs_deviation(train_u);
        if (!cfg.noise_std_y.has_value()) std_y = cfg.noise_fraction * max_abs_deviation(train_y);
    }

    Dataset ds;
    ds.sampling_time = cfg.sampling_time;
    ds.plant_name = plant.name();
    ds.noise_std_u = std_u;
    ds.noise_std_y = std_y;
    ds.master_seed = cfg.seed;
    ds.excitation = cfg.excitation;
    ds.trajectory_length = cfg.trajectory_length;

    // pass 2: store measurement-noise-corrupted data (the plant itself saw
    // the noiseless input)
    for (int i = 0; i < total; ++i) {
        const CleanTrajectory& c = clean[static_cast<std::size_t>(i)];
        DatasetTrajectory t;
        t.id = i;
        t.seed = c.seed;
        t.split = i < cfg.n_train ? Split::Train
                                  : (i < cfg.n_train + cfg.n_val ? Split::Val : Split::Test);
        Rng noise(derive_seed(c.seed, "noise"));
        t.data.u.resize(cfg.trajectory_length, 1);
        t.data.y.resize(cfg.trajectory_length, 1);
        for (int k = 0; k < cfg.trajectory_length; ++k) {
            t.data.u(k, 0) = c.u[k] + std_u * noise.gaussian();
            t.data.y(k, 0) = c.y[k] + std_y * noise.gaussian();
        }
        ds.trajectories.push_back(std::move(t));
    }

    // normalization statistics from the (stored) training split only
    if (cfg.n_train > 0) {
        Eigen::Index n_samples = 0;
        double sum_u = 0.0, sum_y = 0.0;
        for (int i = 0; i < cfg.n_train; ++i) {
            const Trajectory& d = ds.trajectories[static_cast<std::size_t>(i)].data;
            sum_u += d.u.sum();
            sum_y += d.y.sum();
            n_samples += d.u.rows();
        }
        const double mean_u = sum_u / static_cast<double>(n_samples);
        const double mean_y = sum_y / static_cast<double>(n_samples);
        double dev_u = 0.0, dev_y = 0.0;
        for (int i = 0; i < cfg.n_train; ++i) {
            const Trajectory& d = ds.trajectories[static_cast<std::size_t>(i)].data;
            dev_u = std::max(dev_u, (d.u.array() - mean_u).abs().maxCoeff());
            dev_y = std::max(dev_y, (d.y.array() - mean_y).abs().maxCoeff());
        }
        if (dev_u <= 0.0 || dev_y <= 0.0) {
            throw NormalizationError("build_dataset: zero-variance channel in the training split");
        }
        ds.norm.u_mean = Eigen::VectorXd::Constant(1, mean_u);
        ds.norm.u_scale = Eigen::VectorXd::Constant(1, dev_u);
        ds.norm.y_mean = Eigen::VectorXd::Constant(1, mean_y);
        ds.norm.y_scale = Eigen::VectorXd::Constant(1, dev_y);
    } else {
        ds.norm = NormalizationStats::identity(1, 1);
    }
    return ds;
}

}  // namespace nnarx
