#include "nnarx/pipeline.hpp"

#include <fstream>
#include <memory>

#include <nlohmann/json.hpp>

#include "nnarx/errors.hpp"
#include "nnarx/mprs.hpp"
#include "nnarx/ph_plant.hpp"
#include "nnarx/rng.hpp"
#include "nnarx/serialization.hpp"

namespace nnarx {

using nlohmann::json;

void ExperimentConfig::validate() const {
    if (plant != "surrogate" && plant != "ph") {
        throw ConfigError("config: plant must be 'surrogate' or 'ph'");
    }
    if (plant == "ph") {
        if (ph_params_path.empty()) {
            throw ConfigError("config: plant 'ph' requires ph_params_path");
        }
        if (!std::filesystem::exists(ph_params_path)) {
            throw ConfigError("config: ph_params_path does not exist: " + ph_params_path);
        }
    }
    if (n_train + n_val + n_test < 1) {
        throw ConfigError("config: at least one trajectory required");
    }
    if (excitation.levels.size() < 2) {
        throw ConfigError("config: excitation needs at least two levels");
    }
    if (look_back < 1) {
        throw ConfigError("config: look_back must be >= 1");
    }
    if (hidden_widths.empty()) {
        throw ConfigError("config: at least one hidden layer required");
    }
    if (threads < 1) {
        throw ConfigError("config: threads must be >= 1");
    }
}

namespace {

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "nnarx-config";
    j["plant"] = c.plant;
    j["ph_params_path"] = c.ph_params_path;
    j["excitation"]["levels"] = c.excitation.levels;
    j["excitation"]["hold_min"] = c.excitation.hold_min;
    j["excitation"]["hold_max"] = c.excitation.hold_max;
    j["n_train"] = c.n_train;
    j["n_val"] = c.n_val;
    j["n_test"] = c.n_test;
    j["trajectory_length"] = c.trajectory_length;
    if (c.noise_std_u.has_value()) j["noise_std_u"] = *c.noise_std_u;
    if (c.noise_std_y.has_value()) j["noise_std_y"] = *c.noise_std_y;
    j["noise_fraction"] = c.noise_fraction;
    j["sampling_time"] = c.sampling_time;
    j["init_state_span"] = c.init_state_span;
    j["init_state_nominal"] = c.init_state_nominal;
    j["look_back"] = c.look_back;
    j["hidden_widths"] = c.hidden_widths;
    j["activations"] = c.activations;
    j["init_weight_ratio"] = c.init_weight_ratio;
    j["train"]["learning_rate"] = c.train.learning_rate;
    j["train"]["rmsprop_decay"] = c.train.rmsprop_decay;
    j["train"]["rmsprop_epsilon"] = c.train.rmsprop_epsilon;
    j["train"]["max_epochs"] = c.train.max_epochs;
    j["train"]["washout"] = c.train.washout;
    j["train"]["penalty_lambda"] = c.train.penalty.lambda;
    j["train"]["penalty_margin"] = c.train.penalty.margin;
    j["train"]["early_stopping_patience"] = c.train.early_stopping_patience;
    if (c.train.clip_norm.has_value()) j["train"]["clip_norm"] = *c.train.clip_norm;
    j["output_dir"] = c.output_dir;
    j["master_seed"] = c.master_seed;
    j["threads"] = c.threads;
    return j;
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    try {
        c.plant = j.at("plant").get<std::string>();
        c.ph_params_path = j.value("ph_params_path", std::string());
        c.excitation.levels = j.at("excitation").at("levels").get<std::vector<double>>();
        c.excitation.hold_min = j.at("excitation").at("hold_min").get<int>();
        c.excitation.hold_max = j.at("excitation").at("hold_max").get<int>();
        c.n_train = j.at("n_train").get<int>();
        c.n_val = j.at("n_val").get<int>();
        c.n_test = j.at("n_test").get<int>();
        c.trajectory_length = j.at("trajectory_length").get<int>();
        if (j.contains("noise_std_u")) c.noise_std_u = j["noise_std_u"].get<double>();
        if (j.contains("noise_std_y")) c.noise_std_y = j["noise_std_y"].get<double>();
        c.noise_fraction = j.value("noise_fraction", 0.01);
        c.sampling_time = j.value("sampling_time", 1.0);
        c.init_state_span = j.value("init_state_span", 0.5);
        c.init_state_nominal = j.value("init_state_nominal", std::vector<double>());
        c.look_back = j.at("look_back").get<int>();
        c.hidden_widths = j.at("hidden_widths").get<std::vector<int>>();
        c.activations = j.at("activations").get<std::vector<std::string>>();
        c.init_weight_ratio = j.value("init_weight_ratio", 0.5);
        const json& t = j.at("train");
        c.train.learning_rate = t.value("learning_rate", 1e-3);
        c.train.rmsprop_decay = t.value("rmsprop_decay", 0.9);
        c.train.rmsprop_epsilon = t.value("rmsprop_epsilon", 1e-8);
        c.train.max_epochs = t.at("max_epochs").get<int>();
        c.train.washout = t.value("washout", 20);
        c.train.penalty.lambda = t.value("penalty_lambda", 10.0);
        c.train.penalty.margin = t.value("penalty_margin", 0.01);
        c.train.early_stopping_patience = t.value("early_stopping_patience", 200);
        if (t.contains("clip_norm")) {
            c.train.clip_norm = t["clip_norm"].get<double>();
        } else {
            c.train.clip_norm.reset();
        }
        c.output_dir = j.at("output_dir").get<std::string>();
        c.master_seed = j.at("master_seed").get<std::uint64_t>();
        c.threads = j.value("threads", 1);
    } catch (const json::exception& e) {
        throw SchemaError("experiment config: " + std::string(e.what()));
    }
    return c;
}

std::unique_ptr<DiscretePlant> make_plant(const ExperimentConfig& cfg) {
    if (cfg.plant == "surrogate") {
        return std::make_unique<SurrogatePlant>();
    }
    if (cfg.plant == "ph") {
        auto continuous = std::make_shared<const PhPlant>(load_ph_params(cfg.ph_params_path));
        return std::make_unique<Rk4Plant>(continuous, cfg.sampling_time, 10);
    }
    throw ConfigError("config: unknown plant " + cfg.plant);
}

std::string seed_comment(const ExperimentConfig& cfg) {
    return "master_seed=" + std::to_string(cfg.master_seed);
}

}  // namespace

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw SchemaError("experiment config: " + std::string(e.what()));
    }
    if (!j.is_object() || j.value("kind", "") != "nnarx-config" ||
        j.value("schema_version", 0) != kSchemaVersion) {
        throw SchemaError("experiment config: missing or wrong schema_version/kind");
    }
    return config_from_json(j);
}

void save_experiment_config(const std::filesystem::path& path, const ExperimentConfig& cfg) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write config: " + path.string());
    out << config_to_json(cfg).dump(2) << "\n";
}

std::uint64_t dataset_seed(const ExperimentConfig& cfg) {
    return derive_seed(cfg.master_seed, "dataset");
}

std::uint64_t training_seed(const ExperimentConfig& cfg) {
    return derive_seed(cfg.master_seed, "train");
}

std::filesystem::path run_generate(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto plant = make_plant(cfg);

    DatasetBuildConfig build;
    build.n_train = cfg.n_train;
    build.n_val = cfg.n_val;
    build.n_test = cfg.n_test;
    build.trajectory_length = cfg.trajectory_length;
    build.excitation = cfg.excitation;
    build.noise_std_u = cfg.noise_std_u;
    build.noise_std_y = cfg.noise_std_y;
    build.noise_fraction = cfg.noise_fraction;
    build.seed = dataset_seed(cfg);
    build.sampling_time = cfg.sampling_time;
    build.init_state_span = cfg.init_state_span;
    if (!cfg.init_state_nominal.empty()) {
        build.init_state_nominal = Eigen::Map<const Eigen::VectorXd>(
            cfg.init_state_nominal.data(),
            static_cast<Eigen::Index>(cfg.init_state_nominal.size()));
    }

    const Dataset ds = build_dataset(*plant, build);
    const auto dir = std::filesystem::path(cfg.output_dir) / "dataset";
    const auto manifest = save_dataset(dir, ds);
    save_experiment_config(std::filesystem::path(cfg.output_dir) / "config.json", cfg);
    return manifest;
}

TrainArtifacts run_train(const ExperimentConfig& cfg, const std::filesystem::path& manifest) {
    cfg.validate();
    const Dataset ds = load_dataset(manifest);

    ModelInitSpec spec;
    spec.look_back = cfg.look_back;
    spec.hidden_widths = cfg.hidden_widths;
    spec.activations = cfg.activations;
    spec.init_weight_ratio = cfg.init_weight_ratio;

    TrainConfig tc = cfg.train;
    tc.seed = training_seed(cfg);

    TrainArtifacts art;
    const std::filesystem::path out_dir(cfg.output_dir);
    std::filesystem::create_directories(out_dir);
    art.model_path = out_dir / "model.json";
    art.history_path = out_dir / "history.csv";
    art.certificate_path = out_dir / "certificate.json";

    try {
        art.result = train(ds, spec, tc, cfg.threads);
    } catch (const TrainingFailure&) {
        // keep whatever history exists on persistent divergence
        throw;
    }
    save_model(art.model_path, art.result.model);
    save_history_csv(art.history_path, art.result.history,
                     {seed_comment(cfg), "train_seed=" + std::to_string(tc.seed),
                      "dataset=" + manifest.string()});
    save_certificate_json(art.certificate_path, art.result.certificate);
    return art;
}

EvalArtifacts run_evaluate(const ExperimentConfig& cfg, const std::filesystem::path& model_path,
                           const std::filesystem::path& manifest, Split split) {
    const NnarxModel model = load_model(model_path);
    const Dataset ds = load_dataset(manifest);

    EvalArtifacts art;
    art.report = evaluate(model, ds, split, cfg.train.washout, cfg.threads);

    const std::filesystem::path out_dir(cfg.output_dir);
    std::filesystem::create_directories(out_dir);
    const std::string tag = to_string(split);
    art.report_csv = out_dir / ("report_" + tag + ".csv");
    art.summary_json = out_dir / ("summary_" + tag + ".json");
    save_eval_report_csv(art.report_csv, art.report,
                         {seed_comment(cfg), "model=" + model_path.string()});
    save_eval_summary_json(art.summary_json, art.report);

    // plot data per trajectory of the split
    for (const DatasetTrajectory* t : ds.split_view(split)) {
        const Eigen::MatrixXd u_n = ds.norm.normalize_u_rows(t->data.u);
        Eigen::MatrixXd pred;
        try {
            pred = ds.norm.denormalize_y_rows(
                predict_trajectory(model, model.zero_state(), u_n));
        } catch (const NumericDivergence&) {
            continue;  // flagged in the report already
        }
        char name[40];
        std::snprintf(name, sizeof(name), "plot_%s_%03d.csv", tag.c_str(), t->id);
        const auto path = out_dir / name;
        save_plot_data_csv(path, t->data.y, pred,
                           {"trajectory_id=" + std::to_string(t->id), seed_comment(cfg)});
        art.plot_files.push_back(path);
    }
    return art;
}

ProbeArtifacts run_probe(const std::filesystem::path& model_path, const ProbeOptions& opts) {
    const NnarxModel model = load_model(model_path);
    if (opts.horizon < 1) throw ConfigError("probe: horizon must be >= 1");

    MprsConfig mprs;
    mprs.levels = {-1.0, -0.5, 0.0, 0.5, 1.0};
    mprs.hold_min = 5;
    mprs.hold_max = 20;
    mprs.length = opts.horizon;
    mprs.seed = derive_seed(opts.seed, "probe-input");
    const Eigen::VectorXd u = mprs_generate(mprs);
    Eigen::MatrixXd u_seq(opts.horizon, model.m);
    for (int k = 0; k < opts.horizon; ++k) {
        u_seq.row(k).setConstant(u[k]);
    }

    Rng rng(derive_seed(opts.seed, "probe-states"));
    StackedState xa = model.zero_state();
    StackedState xb = model.zero_state();
    for (Eigen::Index i = 0; i < xa.x.size(); ++i) {
        xa.x[i] = opts.offset_scale * rng.uniform(-1.0, 1.0);
        xb.x[i] = opts.offset_scale * rng.uniform(-1.0, 1.0);
    }

    ProbeArtifacts art;
    art.trace = contraction_probe(model, xa, xb, u_seq, opts.horizon);
    art.trace_csv = opts.output;
    if (art.trace.initial_distance() > 0.0) {
        art.ratio = art.trace.final_distance() / art.trace.initial_distance();
    }
    save_probe_csv(art.trace_csv, art.trace,
                   {"model=" + model_path.string(), "seed=" + std::to_string(opts.seed),
                    "horizon=" + std::to_string(opts.horizon)});
    return art;
}

}  // namespace nnarx
