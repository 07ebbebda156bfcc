// nnarx -- experiment driver for stability-certified NNARX identification.
//
// Subcommands: generate, train, certify, evaluate, probe. Every run is
// reproducible from the master seed recorded in the written artifacts.
//
// Exit codes (stable contract):
//   0  success; for `certify`: the model is certified
//   1  `certify` only: the model is not certified
//   2  malformed input file (schema/parse error)
//   3  invalid configuration or arguments
//   4  I/O failure
//   5  numeric failure (divergence, non-convergence, training failure)
//   6  internal error

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nnarx/certificate.hpp"
#include "nnarx/errors.hpp"
#include "nnarx/pipeline.hpp"
#include "nnarx/serialization.hpp"

namespace {

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output_dir;
    std::optional<int> max_epochs;
    std::optional<int> threads;
    std::optional<std::string> plant;
};

// config file plus flag overrides; flags win
nnarx::ExperimentConfig resolve_config(const std::string& config_path, const Overrides& ov) {
    nnarx::ExperimentConfig cfg;
    if (!config_path.empty()) {
        cfg = nnarx::load_experiment_config(config_path);
    }
    if (ov.seed) cfg.master_seed = *ov.seed;
    if (ov.output_dir) cfg.output_dir = *ov.output_dir;
    if (ov.max_epochs) cfg.train.max_epochs = *ov.max_epochs;
    if (ov.threads) cfg.threads = *ov.threads;
    if (ov.plant) cfg.plant = *ov.plant;
    return cfg;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"stability-certified NNARX system identification"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides ov;
    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* opt = sub->add_option("-c,--config", config_path, "experiment config (JSON)");
        if (config_required) opt->required();
        sub->add_option("--seed", ov.seed, "override the master seed");
        sub->add_option("--output-dir", ov.output_dir, "override the output directory");
        sub->add_option("--threads", ov.threads, "worker threads for validation/evaluation");
    };

    auto* generate = app.add_subcommand("generate", "simulate the plant and write a dataset");
    add_common(generate, true);
    generate->add_option("--plant", ov.plant, "override the plant selection");

    std::string dataset_path, model_path;
    auto* train = app.add_subcommand("train", "fit a model on a generated dataset");
    add_common(train, true);
    train->add_option("--dataset", dataset_path, "dataset manifest path")->required();
    train->add_option("--max-epochs", ov.max_epochs, "override the epoch budget");

    double margin = 0.0;
    std::string cert_json;
    auto* certify_cmd = app.add_subcommand("certify", "evaluate the stability certificate");
    certify_cmd->add_option("--model", model_path, "model file")->required();
    certify_cmd->add_option("--margin", margin,
                            "require nu < -margin for exit code 0 (conservative audit)");
    certify_cmd->add_option("--json", cert_json, "also write the report as JSON");

    std::string split_name = "test";
    auto* evaluate_cmd = app.add_subcommand("evaluate", "score a model on a dataset split");
    add_common(evaluate_cmd, false);
    evaluate_cmd->add_option("--model", model_path, "model file")->required();
    evaluate_cmd->add_option("--dataset", dataset_path, "dataset manifest path")->required();
    evaluate_cmd->add_option("--split", split_name, "train, val or test");

    nnarx::ProbeOptions probe_opts;
    auto* probe_cmd = app.add_subcommand("probe", "contraction probe on a stored model");
    probe_cmd->add_option("--model", model_path, "model file")->required();
    probe_cmd->add_option("--horizon", probe_opts.horizon, "number of probe steps");
    probe_cmd->add_option("--probe-seed", probe_opts.seed, "seed of the probe's input and states");
    probe_cmd->add_option("--offset-scale", probe_opts.offset_scale,
                          "scale of the random initial states");
    probe_cmd->add_option("--output", probe_opts.output, "trace CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 3;
    }

    if (generate->parsed()) {
        const auto cfg = resolve_config(config_path, ov);
        const auto manifest = nnarx::run_generate(cfg);
        std::cout << "dataset manifest: " << manifest.string() << "\n";
        return 0;
    }

    if (train->parsed()) {
        const auto cfg = resolve_config(config_path, ov);
        const auto art = nnarx::run_train(cfg, dataset_path);
        std::cout << "model:       " << art.model_path.string() << "\n"
                  << "history:     " << art.history_path.string() << "\n"
                  << "certificate: " << art.certificate_path.string() << "\n"
                  << "epochs run:  " << art.result.history.records.size()
                  << " (best " << art.result.history.best_epoch << ")\n"
                  << "residual nu: " << nnarx::format_double(art.result.certificate.residual)
                  << (art.result.certificate.certified() ? " (certified)" : " (NOT certified)")
                  << "\n";
        return 0;
    }

    if (certify_cmd->parsed()) {
        const auto model = nnarx::load_model(model_path);
        const auto report = nnarx::certify(model);
        std::cout << nnarx::certificate_table(report);
        if (margin > 0.0) {
            std::cout << "  margin             = " << nnarx::format_double(margin) << "\n";
        }
        if (!cert_json.empty()) {
            nnarx::save_certificate_json(cert_json, report);
        }
        return report.residual < -margin ? 0 : 1;
    }

    if (evaluate_cmd->parsed()) {
        const auto cfg = resolve_config(config_path, ov);
        const auto split = nnarx::split_from_string(split_name);
        const auto art = nnarx::run_evaluate(cfg, model_path, dataset_path, split);
        std::cout << "report:  " << art.report_csv.string() << "\n"
                  << "summary: " << art.summary_json.string() << "\n"
                  << "aggregate FIT: " << nnarx::format_double(art.report.aggregate_fit)
                  << " % over " << art.report.per_trajectory.size() << " trajectories";
        if (art.report.diverged_count > 0) {
            std::cout << " (" << art.report.diverged_count << " diverged)";
        }
        std::cout << "\n";
        return 0;
    }

    if (probe_cmd->parsed()) {
        const auto art = nnarx::run_probe(model_path, probe_opts);
        std::cout << "trace: " << art.trace_csv.string() << "\n";
        if (art.trace.diverged_at.has_value()) {
            std::cout << "trajectories diverged at step " << *art.trace.diverged_at
                      << " (model is unstable)\n";
        } else {
            std::cout << "final/initial distance ratio: " << nnarx::format_double(art.ratio)
                      << "\n";
        }
        return 0;
    }

    return 3;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const nnarx::SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return 2;
    } catch (const nnarx::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const nnarx::InvalidArgument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return 3;
    } catch (const nnarx::NumericDivergence& e) {
        std::cerr << "numeric divergence: " << e.what() << "\n";
        return 5;
    } catch (const nnarx::ConvergenceFailure& e) {
        std::cerr << "convergence failure: " << e.what() << "\n";
        return 5;
    } catch (const nnarx::TrainingFailure& e) {
        std::cerr << "training failure: " << e.what() << "\n";
        return 5;
    } catch (const nnarx::InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 6;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 6;
    }
}
