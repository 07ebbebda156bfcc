#include "nnarx/serialization.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nnarx/errors.hpp"

namespace nnarx {

using nlohmann::json;

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

namespace {

double parse_double(std::string_view text, const char* context) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw SchemaError(std::string(context) + ": bad number '" + std::string(text) + "'");
    }
    return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write file: " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read file: " + path.string());
    return in;
}

json matrix_to_json(const Eigen::MatrixXd& mat) {
    json j;
    j["rows"] = mat.rows();
    j["cols"] = mat.cols();
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(mat.size()));
    for (Eigen::Index r = 0; r < mat.rows(); ++r) {
        for (Eigen::Index c = 0; c < mat.cols(); ++c) {
            data.push_back(mat(r, c));  // row-major payload
        }
    }
    j["data"] = data;
    return j;
}

Eigen::MatrixXd matrix_from_json(const json& j, const char* what) {
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data")) {
        throw SchemaError(std::string("model file: malformed matrix ") + what);
    }
    const Eigen::Index rows = j["rows"].get<Eigen::Index>();
    const Eigen::Index cols = j["cols"].get<Eigen::Index>();
    const auto& data = j["data"];
    if (rows < 0 || cols < 0 || !data.is_array() ||
        static_cast<Eigen::Index>(data.size()) != rows * cols) {
        throw SchemaError(std::string("model file: matrix shape mismatch in ") + what);
    }
    Eigen::MatrixXd mat(rows, cols);
    std::size_t at = 0;
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            mat(r, c) = data[at++].get<double>();
        }
    }
    return mat;
}

json vector_to_json(const Eigen::VectorXd& v) {
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vector_from_json(const json& j, const char* what) {
    if (!j.is_array()) {
        throw SchemaError(std::string("model file: malformed vector ") + what);
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        v[i] = j[static_cast<std::size_t>(i)].get<double>();
    }
    return v;
}

void check_schema(const json& j, const char* kind) {
    if (!j.is_object() || !j.contains("schema_version") || !j.contains("kind")) {
        throw SchemaError(std::string(kind) + ": missing schema_version/kind");
    }
    if (j["schema_version"].get<int>() != kSchemaVersion) {
        throw SchemaError(std::string(kind) + ": unsupported schema version");
    }
    if (j["kind"].get<std::string>() != kind) {
        throw SchemaError(std::string(kind) + ": wrong artifact kind '" +
                          j["kind"].get<std::string>() + "'");
    }
}

}  // namespace

void save_model(const std::filesystem::path& path, const NnarxModel& model) {
    model.validate();
    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "nnarx-model";
    j["look_back"] = model.N;
    j["input_dim"] = model.m;
    j["output_dim"] = model.p;
    json layers = json::array();
    for (const FfnnLayer& L : model.ffnn.layers) {
        json layer;
        layer["activation"] = L.activation.name;
        layer["lipschitz"] = L.activation.lipschitz;
        layer["W"] = matrix_to_json(L.W);
        layer["U"] = matrix_to_json(L.U);
        layer["b"] = vector_to_json(L.b);
        layers.push_back(std::move(layer));
    }
    j["layers"] = std::move(layers);
    j["output"]["U0"] = matrix_to_json(model.ffnn.U0);
    j["output"]["b0"] = vector_to_json(model.ffnn.b0);
    j["normalization"]["u_mean"] = vector_to_json(model.norm.u_mean);
    j["normalization"]["u_scale"] = vector_to_json(model.norm.u_scale);
    j["normalization"]["y_mean"] = vector_to_json(model.norm.y_mean);
    j["normalization"]["y_scale"] = vector_to_json(model.norm.y_scale);

    auto out = open_out(path);
    out << j.dump(2) << "\n";
}

NnarxModel load_model(const std::filesystem::path& path) {
    auto in = open_in(path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw SchemaError("model file: " + std::string(e.what()));
    }
    check_schema(j, "nnarx-model");
    try {
        NnarxModel model;
        model.N = j.at("look_back").get<int>();
        model.m = j.at("input_dim").get<int>();
        model.p = j.at("output_dim").get<int>();
        for (const json& layer : j.at("layers")) {
            FfnnLayer L;
            const std::string act_name = layer.at("activation").get<std::string>();
            try {
                L.activation = activation_by_name(act_name);
            } catch (const InvalidArgument&) {
                throw SchemaError("model file: activation '" + act_name +
                                  "' is not registered; register it before loading");
            }
            const double stored_lipschitz = layer.at("lipschitz").get<double>();
            if (stored_lipschitz != L.activation.lipschitz) {
                throw SchemaError("model file: Lipschitz constant of '" + act_name +
                                  "' disagrees with the registered activation");
            }
            L.W = matrix_from_json(layer.at("W"), "W");
            L.U = matrix_from_json(layer.at("U"), "U");
            L.b = vector_from_json(layer.at("b"), "b");
            model.ffnn.layers.push_back(std::move(L));
        }
        model.ffnn.U0 = matrix_from_json(j.at("output").at("U0"), "U0");
        model.ffnn.b0 = vector_from_json(j.at("output").at("b0"), "b0");
        model.norm.u_mean = vector_from_json(j.at("normalization").at("u_mean"), "u_mean");
        model.norm.u_scale = vector_from_json(j.at("normalization").at("u_scale"), "u_scale");
        model.norm.y_mean = vector_from_json(j.at("normalization").at("y_mean"), "y_mean");
        model.norm.y_scale = vector_from_json(j.at("normalization").at("y_scale"), "y_scale");
        try {
            model.validate();
        } catch (const InvalidModel& e) {
            throw SchemaError("model file: " + std::string(e.what()));
        }
        return model;
    } catch (const json::exception& e) {
        throw SchemaError("model file: " + std::string(e.what()));
    }
}

void save_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                         const std::vector<std::string>& comments) {
    if (traj.u.rows() != traj.y.rows()) {
        throw InvalidArgument("save_trajectory_csv: sample counts differ");
    }
    auto out = open_out(path);
    out << "# schema_version=" << kSchemaVersion << "\n";
    for (const std::string& c : comments) {
        out << "# " << c << "\n";
    }
    out << "k";
    for (Eigen::Index c = 0; c < traj.u.cols(); ++c) out << ",u_" << (c + 1);
    for (Eigen::Index c = 0; c < traj.y.cols(); ++c) out << ",y_" << (c + 1);
    out << "\n";
    for (Eigen::Index k = 0; k < traj.u.rows(); ++k) {
        out << k;
        for (Eigen::Index c = 0; c < traj.u.cols(); ++c) {
            out << "," << format_double(traj.u(k, c));
        }
        for (Eigen::Index c = 0; c < traj.y.cols(); ++c) {
            out << "," << format_double(traj.y(k, c));
        }
        out << "\n";
    }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    return fields;
}

}  // namespace

Trajectory load_trajectory_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    // skip comments, read header
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '#') break;
    }
    const auto header = split_csv_line(line);
    if (header.empty() || header[0] != "k") {
        throw SchemaError("trajectory CSV: header must start with 'k'");
    }
    int m = 0, p = 0;
    for (std::size_t i = 1; i < header.size(); ++i) {
        if (header[i].rfind("u_", 0) == 0) {
            ++m;
        } else if (header[i].rfind("y_", 0) == 0) {
            ++p;
        } else {
            throw SchemaError("trajectory CSV: unexpected column " + header[i]);
        }
    }
    if (m < 1 || p < 1) {
        throw SchemaError("trajectory CSV: need at least one u and one y column");
    }

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw SchemaError("trajectory CSV: wrong field count in row");
        }
        std::vector<double> row;
        row.reserve(fields.size() - 1);
        for (std::size_t i = 1; i < fields.size(); ++i) {
            row.push_back(parse_double(fields[i], "trajectory CSV"));
        }
        rows.push_back(std::move(row));
    }
    Trajectory traj;
    traj.u.resize(static_cast<Eigen::Index>(rows.size()), m);
    traj.y.resize(static_cast<Eigen::Index>(rows.size()), p);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (int c = 0; c < m; ++c) traj.u(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
        for (int c = 0; c < p; ++c) {
            traj.y(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(m + c)];
        }
    }
    return traj;
}

std::filesystem::path save_dataset(const std::filesystem::path& dir, const Dataset& ds) {
    std::filesystem::create_directories(dir);
    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "nnarx-dataset";
    j["plant"] = ds.plant_name;
    j["sampling_time"] = ds.sampling_time;
    j["master_seed"] = ds.master_seed;
    j["noise_std_u"] = ds.noise_std_u;
    j["noise_std_y"] = ds.noise_std_y;
    j["noise_model"] = "gaussian-measurement-only";  // plant saw the clean input
    j["trajectory_length"] = ds.trajectory_length;
    j["excitation"]["levels"] = ds.excitation.levels;
    j["excitation"]["hold_min"] = ds.excitation.hold_min;
    j["excitation"]["hold_max"] = ds.excitation.hold_max;
    j["normalization"]["u_mean"] = vector_to_json(ds.norm.u_mean);
    j["normalization"]["u_scale"] = vector_to_json(ds.norm.u_scale);
    j["normalization"]["y_mean"] = vector_to_json(ds.norm.y_mean);
    j["normalization"]["y_scale"] = vector_to_json(ds.norm.y_scale);

    json list = json::array();
    for (const DatasetTrajectory& t : ds.trajectories) {
        char name[40];
        std::snprintf(name, sizeof(name), "trajectory_%03d.csv", t.id);
        save_trajectory_csv(dir / name, t.data,
                            {std::string("split=") + to_string(t.split),
                             "seed=" + std::to_string(t.seed)});
        json entry;
        entry["id"] = t.id;
        entry["split"] = to_string(t.split);
        entry["seed"] = t.seed;
        entry["file"] = name;
        list.push_back(std::move(entry));
    }
    j["trajectories"] = std::move(list);

    const auto manifest = dir / "manifest.json";
    auto out = open_out(manifest);
    out << j.dump(2) << "\n";
    return manifest;
}

Dataset load_dataset(const std::filesystem::path& manifest_path) {
    auto in = open_in(manifest_path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw SchemaError("dataset manifest: " + std::string(e.what()));
    }
    check_schema(j, "nnarx-dataset");
    try {
        Dataset ds;
        ds.plant_name = j.at("plant").get<std::string>();
        ds.sampling_time = j.at("sampling_time").get<double>();
        ds.master_seed = j.at("master_seed").get<std::uint64_t>();
        ds.noise_std_u = j.at("noise_std_u").get<double>();
        ds.noise_std_y = j.at("noise_std_y").get<double>();
        ds.trajectory_length = j.at("trajectory_length").get<int>();
        ds.excitation.levels = j.at("excitation").at("levels").get<std::vector<double>>();
        ds.excitation.hold_min = j.at("excitation").at("hold_min").get<int>();
        ds.excitation.hold_max = j.at("excitation").at("hold_max").get<int>();
        ds.norm.u_mean = vector_from_json(j.at("normalization").at("u_mean"), "u_mean");
        ds.norm.u_scale = vector_from_json(j.at("normalization").at("u_scale"), "u_scale");
        ds.norm.y_mean = vector_from_json(j.at("normalization").at("y_mean"), "y_mean");
        ds.norm.y_scale = vector_from_json(j.at("normalization").at("y_scale"), "y_scale");

        const auto dir = manifest_path.parent_path();
        for (const json& entry : j.at("trajectories")) {
            DatasetTrajectory t;
            t.id = entry.at("id").get<int>();
            t.split = split_from_string(entry.at("split").get<std::string>());
            t.seed = entry.at("seed").get<std::uint64_t>();
            t.data = load_trajectory_csv(dir / entry.at("file").get<std::string>());
            ds.trajectories.push_back(std::move(t));
        }
        return ds;
    } catch (const json::exception& e) {
        throw SchemaError("dataset manifest: " + std::string(e.what()));
    }
}

void save_history_csv(const std::filesystem::path& path, const TrainHistory& history,
                      const std::vector<std::string>& comments) {
    auto out = open_out(path);
    out << "# schema_version=" << kSchemaVersion << "\n";
    for (const std::string& c : comments) {
        out << "# " << c << "\n";
    }
    out << "# best_epoch=" << history.best_epoch << "\n";
    out << "epoch,loss,val_error,nu,certified\n";
    for (const EpochRecord& r : history.records) {
        out << r.epoch << "," << format_double(r.train_loss) << ","
            << format_double(r.val_error) << "," << format_double(r.nu) << ","
            << (r.certified ? 1 : 0) << "\n";
    }
}

void save_certificate_json(const std::filesystem::path& path, const CertificateReport& report) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "nnarx-certificate";
    j["spectral_norms"] = report.spectral_norms;
    j["lipschitz_product"] = report.lipschitz_product;
    j["weight_product"] = report.weight_product;
    j["threshold"] = report.threshold;
    j["residual"] = report.residual;
    j["look_back"] = report.look_back;
    j["verdict"] = report.certified() ? "CertifiedIssAndDeltaIss" : "NotCertified";
    j["K_x"] = report.constants.K_x;
    j["K_u"] = report.constants.K_u;
    j["K_b"] = report.constants.K_b;
    auto out = open_out(path);
    out << j.dump(2) << "\n";
}

std::string certificate_table(const CertificateReport& report) {
    std::ostringstream os;
    os << "stability certificate (look-back N = " << report.look_back << ")\n";
    for (std::size_t i = 0; i < report.spectral_norms.size(); ++i) {
        os << "  ||U_" << i << "||            = " << format_double(report.spectral_norms[i])
           << "\n";
    }
    os << "  weight product     = " << format_double(report.weight_product) << "\n"
       << "  Lipschitz product  = " << format_double(report.lipschitz_product) << "\n"
       << "  threshold          = " << format_double(report.threshold) << "\n"
       << "  residual nu        = " << format_double(report.residual) << "\n"
       << "  K_x, K_u, K_b      = " << format_double(report.constants.K_x) << ", "
       << format_double(report.constants.K_u) << ", " << format_double(report.constants.K_b)
       << "\n"
       << "  verdict            = "
       << (report.certified() ? "certified ISS and deltaISS"
                              : "not certified (condition is sufficient, not necessary)")
       << "\n";
    return os.str();
}

void save_eval_report_csv(const std::filesystem::path& path, const EvalReport& report,
                          const std::vector<std::string>& comments) {
    auto out = open_out(path);
    out << "# schema_version=" << kSchemaVersion << "\n";
    for (const std::string& c : comments) {
        out << "# " << c << "\n";
    }
    out << "# split=" << to_string(report.split) << " washout=" << report.washout
        << " domain=" << report.domain << "\n";
    out << "trajectory_id,fit,rmse,max_abs_error,diverged\n";
    for (const TrajectoryEval& t : report.per_trajectory) {
        out << t.trajectory_id << "," << format_double(t.fit) << ","
            << format_double(t.rmse) << "," << format_double(t.max_abs_error) << ","
            << (t.diverged ? 1 : 0) << "\n";
    }
}

void save_eval_summary_json(const std::filesystem::path& path, const EvalReport& report) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "nnarx-eval-summary";
    j["split"] = to_string(report.split);
    j["washout"] = report.washout;
    j["domain"] = report.domain;
    j["aggregate_fit"] = report.aggregate_fit;
    j["aggregate_fit_per_channel"] = report.aggregate_fit_per_channel;
    j["aggregate_rmse"] = report.aggregate_rmse;
    j["aggregate_max_abs_error"] = report.aggregate_max_abs_error;
    j["diverged_count"] = report.diverged_count;
    j["certified"] = report.certified;
    j["residual"] = report.residual;
    json rows = json::array();
    for (const TrajectoryEval& t : report.per_trajectory) {
        json row;
        row["trajectory_id"] = t.trajectory_id;
        row["fit"] = t.fit;
        row["fit_per_channel"] = t.fit_per_channel;
        row["rmse"] = t.rmse;
        row["max_abs_error"] = t.max_abs_error;
        row["diverged"] = t.diverged;
        rows.push_back(std::move(row));
    }
    j["per_trajectory"] = std::move(rows);
    auto out = open_out(path);
    out << j.dump(2) << "\n";
}

void save_plot_data_csv(const std::filesystem::path& path, const Eigen::MatrixXd& y_true,
                        const Eigen::MatrixXd& y_pred,
                        const std::vector<std::string>& comments) {
    if (y_true.rows() != y_pred.rows() || y_true.cols() != y_pred.cols()) {
        throw InvalidArgument("save_plot_data_csv: shape mismatch");
    }
    auto out = open_out(path);
    out << "# schema_version=" << kSchemaVersion << "\n";
    for (const std::string& c : comments) {
        out << "# " << c << "\n";
    }
    out << "k";
    for (Eigen::Index c = 0; c < y_true.cols(); ++c) out << ",y_true_" << (c + 1);
    for (Eigen::Index c = 0; c < y_true.cols(); ++c) out << ",y_pred_" << (c + 1);
    for (Eigen::Index c = 0; c < y_true.cols(); ++c) out << ",residual_" << (c + 1);
    out << "\n";
    for (Eigen::Index k = 0; k < y_true.rows(); ++k) {
        out << k;
        for (Eigen::Index c = 0; c < y_true.cols(); ++c) out << "," << format_double(y_true(k, c));
        for (Eigen::Index c = 0; c < y_true.cols(); ++c) out << "," << format_double(y_pred(k, c));
        for (Eigen::Index c = 0; c < y_true.cols(); ++c) {
            out << "," << format_double(y_true(k, c) - y_pred(k, c));
        }
        out << "\n";
    }
}

void save_probe_csv(const std::filesystem::path& path, const ContractionTrace& trace,
                    const std::vector<std::string>& comments) {
    auto out = open_out(path);
    out << "# schema_version=" << kSchemaVersion << "\n";
    for (const std::string& c : comments) {
        out << "# " << c << "\n";
    }
    if (trace.diverged_at.has_value()) {
        out << "# diverged_at=" << *trace.diverged_at << "\n";
    }
    out << "k,distance\n";
    for (std::size_t k = 0; k < trace.distance.size(); ++k) {
        out << k << "," << format_double(trace.distance[k]) << "\n";
    }
}

}  // namespace nnarx
