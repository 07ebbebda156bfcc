#include "nnarx/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>

#include "nnarx/errors.hpp"
#include "nnarx/rng.hpp"

namespace nnarx {

double penalty_rho(double nu, const PenaltyConfig& cfg) {
    if (!std::isfinite(nu)) {
        throw InvalidArgument("penalty_rho: non-finite residual");
    }
    if (cfg.lambda < 0.0 || cfg.margin < 0.0) {
        throw InvalidArgument("penalty_rho: lambda and margin must be nonnegative");
    }
    return nu <= -cfg.margin ? 0.0 : cfg.lambda * (nu + cfg.margin);
}

double penalty_slope(double nu, const PenaltyConfig& cfg) {
    if (cfg.lambda == 0.0) return 0.0;
    return nu >= -cfg.margin ? cfg.lambda : 0.0;
}

NnarxModel init_model(const ModelInitSpec& spec, const NormalizationStats& norm,
                      std::uint64_t seed) {
    if (spec.look_back < 1 || spec.input_dim < 1 || spec.output_dim < 1) {
        throw ConfigError("init_model: dimensions must be >= 1");
    }
    if (spec.hidden_widths.empty()) {
        throw ConfigError("init_model: at least one hidden layer required");
    }
    std::vector<std::string> act_names = spec.activations;
    if (act_names.size() == 1 && spec.hidden_widths.size() > 1) {
        act_names.assign(spec.hidden_widths.size(), act_names.front());
    }
    if (act_names.size() != spec.hidden_widths.size()) {
        throw ConfigError("init_model: one activation per hidden layer required");
    }
    if (!(spec.init_weight_ratio > 0.0 && spec.init_weight_ratio < 1.0)) {
        throw ConfigError("init_model: init_weight_ratio must be in (0, 1)");
    }

    NnarxModel model;
    model.N = spec.look_back;
    model.m = spec.input_dim;
    model.p = spec.output_dim;
    model.norm = norm;

    Rng rng(seed);
    auto fill = [&rng](Eigen::Ref<Eigen::MatrixXd> mat) {
        // row-major fill order, part of the documented seed derivation
        for (Eigen::Index r = 0; r < mat.rows(); ++r) {
            for (Eigen::Index c = 0; c < mat.cols(); ++c) {
                mat(r, c) = rng.uniform(-1.0, 1.0);
            }
        }
    };

    int below = model.state_dim();
    for (std::size_t i = 0; i < spec.hidden_widths.size(); ++i) {
        const int h = spec.hidden_widths[i];
        if (h < 1) throw ConfigError("init_model: hidden widths must be >= 1");
        FfnnLayer layer;
        layer.W.resize(h, model.m);
        layer.U.resize(h, below);
        layer.b.resize(h);
        fill(layer.W);
        fill(layer.U);
        fill(layer.b);
        layer.activation = activation_by_name(act_names[i]);
        model.ffnn.layers.push_back(std::move(layer));
        below = h;
    }
    model.ffnn.U0.resize(model.p, below);
    model.ffnn.b0.resize(model.p);
    fill(model.ffnn.U0);
    fill(model.ffnn.b0);

    // rescale everything so the weight product starts inside the certified
    // region at the requested fraction of the threshold
    double product = spectral_norm(model.ffnn.U0);
    double lipschitz_product = 1.0;
    for (const FfnnLayer& L : model.ffnn.layers) {
        product *= spectral_norm(L.U);
        lipschitz_product *= L.activation.lipschitz;
    }
    const double threshold =
        1.0 / (lipschitz_product * std::sqrt(static_cast<double>(model.N)));
    if (product > 0.0) {
        const double target = spec.init_weight_ratio * threshold;
        const double r = std::pow(target / product,
                                  1.0 / static_cast<double>(model.ffnn.depth() + 1));
        for (FfnnLayer& L : model.ffnn.layers) {
            L.W *= r;
            L.U *= r;
            L.b *= r;
        }
        model.ffnn.U0 *= r;
        model.ffnn.b0 *= r;
    }

    model.validate();
    return model;
}

double loss(const NnarxModel& model, const Trajectory& trajectory, int washout,
            const PenaltyConfig& penalty, const StackedState& init_state) {
    const Eigen::Index T = trajectory.u.rows();
    if (trajectory.y.rows() != T) {
        throw InvalidArgument("loss: input/output sample counts differ");
    }
    if (washout < 0 || T <= washout) {
        throw InvalidArgument("loss: need more samples than the washout window");
    }
    const Eigen::MatrixXd pred = predict_trajectory(model, init_state, trajectory.u);
    double acc = 0.0;
    for (Eigen::Index k = washout; k < T; ++k) {
        acc += (pred.row(k) - trajectory.y.row(k)).squaredNorm();
    }
    acc /= static_cast<double>(T - washout);
    if (penalty.lambda > 0.0) {
        acc += penalty_rho(stability_residual(model), penalty);
    }
    return acc;
}

namespace {

StackedState random_state(int N, int m, int p, std::uint64_t seed) {
    Rng rng(seed);
    StackedState s = zero_state(N, m, p);
    for (Eigen::Index i = 0; i < s.x.size(); ++i) {
        s.x[i] = rng.uniform(-1.0, 1.0);
    }
    return s;
}

// Fisher-Yates with the library Rng, independent of std::shuffle details.
void seeded_shuffle(std::vector<int>& order, std::uint64_t seed) {
    Rng rng(seed);
    for (std::size_t i = order.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
        std::swap(order[i - 1], order[j]);
    }
}

double validation_error(const NnarxModel& model, const std::vector<Trajectory>& val,
                        int washout, int threads) {
    const PenaltyConfig no_penalty{0.0, 0.0};
    std::vector<double> errors(val.size());
    auto eval_one = [&](std::size_t i) {
        StackedState x0 = zero_state(model.N, model.m, model.p);
        try {
            errors[i] = loss(model, val[i], washout, no_penalty, x0);
        } catch (const NumericDivergence&) {
            errors[i] = std::numeric_limits<double>::infinity();
        }
    };
    if (threads > 1 && val.size() > 1) {
        std::vector<std::future<void>> futures;
        futures.reserve(val.size());
        for (std::size_t i = 0; i < val.size(); ++i) {
            futures.push_back(std::async(std::launch::async, eval_one, i));
        }
        for (auto& f : futures) f.get();
    } else {
        for (std::size_t i = 0; i < val.size(); ++i) eval_one(i);
    }
    // fixed-order reduction keeps the result independent of scheduling
    double acc = 0.0;
    for (double e : errors) acc += e;
    return acc / static_cast<double>(errors.size());
}

}  // namespace

TrainResult train(const Dataset& dataset, const ModelInitSpec& init_spec,
                  const TrainConfig& cfg, int threads) {
    if (cfg.max_epochs < 0) throw ConfigError("train: max_epochs must be >= 0");
    if (cfg.early_stopping_patience < 1 ||
        (cfg.max_epochs > 0 && cfg.early_stopping_patience > cfg.max_epochs)) {
        throw ConfigError("train: patience must be in [1, max_epochs]");
    }
    if (cfg.washout < 0) throw ConfigError("train: washout must be >= 0");

    std::vector<Trajectory> train_set, val_set;
    for (const DatasetTrajectory& t : dataset.trajectories) {
        Trajectory norm_traj{dataset.norm.normalize_u_rows(t.data.u),
                             dataset.norm.normalize_y_rows(t.data.y)};
        if (t.split == Split::Train) {
            train_set.push_back(std::move(norm_traj));
        } else if (t.split == Split::Val) {
            val_set.push_back(std::move(norm_traj));
        }
    }
    if (train_set.empty() || val_set.empty()) {
        throw ConfigError("train: need at least one training and one validation trajectory");
    }
    for (const Trajectory& t : train_set) {
        if (t.length() <= cfg.washout) {
            throw ConfigError("train: washout must be shorter than every trajectory");
        }
    }
    for (const Trajectory& t : val_set) {
        if (t.length() <= cfg.washout) {
            throw ConfigError("train: washout must be shorter than every trajectory");
        }
    }

    ModelInitSpec spec = init_spec;
    spec.input_dim = static_cast<int>(dataset.norm.u_mean.size());
    spec.output_dim = static_cast<int>(dataset.norm.y_mean.size());
    NnarxModel model = init_model(spec, dataset.norm, derive_seed(cfg.seed, "init"));

    // one seeded random start state per training trajectory, fixed for the
    // whole run; washout absorbs it
    std::vector<StackedState> train_inits;
    train_inits.reserve(train_set.size());
    for (std::size_t i = 0; i < train_set.size(); ++i) {
        train_inits.push_back(
            random_state(model.N, model.m, model.p, derive_seed(cfg.seed, "train-init", i)));
    }

    RmspropConfig opt_cfg{cfg.learning_rate, cfg.rmsprop_decay, cfg.rmsprop_epsilon,
                          cfg.clip_norm};
    RmspropState opt_state = RmspropState::init(model.ffnn);

    TrainResult result;
    result.history.best_epoch = 0;

    FfnnParams best_params = model.ffnn;
    double best_val = std::numeric_limits<double>::infinity();
    int stale_epochs = 0;
    std::vector<int> fail_count(train_set.size(), 0);

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        const auto t_start = std::chrono::steady_clock::now();

        std::vector<int> order(train_set.size());
        std::iota(order.begin(), order.end(), 0);
        seeded_shuffle(order, derive_seed(cfg.seed, "shuffle", static_cast<std::uint64_t>(epoch)));

        double epoch_loss = 0.0;
        int applied = 0;
        for (int idx : order) {
            const std::size_t i = static_cast<std::size_t>(idx);
            bool diverged = false;
            BatchGradients bg;
            try {
                bg = gradients(model, {train_set[i]}, {train_inits[i]}, cfg.washout,
                               cfg.penalty);
                diverged = !std::isfinite(bg.loss) || !bg.grads.all_finite();
            } catch (const NumericDivergence&) {
                diverged = true;
            }
            if (diverged) {
                // loss treated as +inf: skip the update, halve this
                // trajectory's next step, give up after 3 retries
                if (++fail_count[i] > 3) {
                    throw TrainingFailure("train: trajectory " + std::to_string(idx) +
                                          " diverged repeatedly");
                }
                continue;
            }
            RmspropConfig batch_cfg = opt_cfg;
            batch_cfg.learning_rate =
                opt_cfg.learning_rate / static_cast<double>(1 << fail_count[i]);
            rmsprop_step(model.ffnn, bg.grads, opt_state, batch_cfg);
            fail_count[i] = 0;
            epoch_loss += bg.loss;
            ++applied;
        }
        epoch_loss = applied > 0 ? epoch_loss / applied
                                 : std::numeric_limits<double>::infinity();

        const double val_error = validation_error(model, val_set, cfg.washout, threads);
        const double nu = stability_residual(model);

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = epoch_loss;
        rec.val_error = val_error;
        rec.nu = nu;
        rec.certified = nu < 0.0;
        rec.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        result.history.records.push_back(rec);

        if (val_error < best_val) {
            best_val = val_error;
            best_params = model.ffnn;
            result.history.best_epoch = epoch;
            stale_epochs = 0;
        } else {
            ++stale_epochs;
            if (stale_epochs >= cfg.early_stopping_patience) break;
        }
    }

    model.ffnn = std::move(best_params);
    result.model = std::move(model);
    result.certificate = certify(result.model);
    return result;
}

}  // namespace nnarx
