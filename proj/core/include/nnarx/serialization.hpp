#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nnarx/certificate.hpp"
#include "nnarx/dataset.hpp"
#include "nnarx/metrics.hpp"
#include "nnarx/model.hpp"
#include "nnarx/probes.hpp"
#include "nnarx/training.hpp"

namespace nnarx {

inline constexpr int kSchemaVersion = 1;

/// Shortest decimal form that round-trips the exact double. Used for every
/// floating-point value written to CSV so that identical runs produce
/// byte-identical files.
std::string format_double(double value);

// --- model files (versioned JSON schema) ---------------------------------

void save_model(const std::filesystem::path& path, const NnarxModel& model);
/// Throws SchemaError for malformed files or unknown activation tags.
NnarxModel load_model(const std::filesystem::path& path);

// --- trajectory CSV (header k,u_1..u_m,y_1..y_p) --------------------------

void save_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                         const std::vector<std::string>& comments = {});
Trajectory load_trajectory_csv(const std::filesystem::path& path);

// --- dataset directory: manifest.json plus one CSV per trajectory ---------

/// Writes `dir/manifest.json` and `dir/trajectory_XXX.csv`; returns the
/// manifest path.
std::filesystem::path save_dataset(const std::filesystem::path& dir, const Dataset& ds);
Dataset load_dataset(const std::filesystem::path& manifest_path);

// --- training history CSV (epoch,loss,val_error,nu,certified) -------------

void save_history_csv(const std::filesystem::path& path, const TrainHistory& history,
                      const std::vector<std::string>& comments = {});

// --- certificate report ----------------------------------------------------

void save_certificate_json(const std::filesystem::path& path, const CertificateReport& report);
/// Human-readable table for terminal output.
std::string certificate_table(const CertificateReport& report);

// --- evaluation report ------------------------------------------------------

void save_eval_report_csv(const std::filesystem::path& path, const EvalReport& report,
                          const std::vector<std::string>& comments = {});
void save_eval_summary_json(const std::filesystem::path& path, const EvalReport& report);
/// Plot data for one trajectory: k, y_true_*, y_pred_*, residual_* columns.
void save_plot_data_csv(const std::filesystem::path& path, const Eigen::MatrixXd& y_true,
                        const Eigen::MatrixXd& y_pred,
                        const std::vector<std::string>& comments = {});

// --- probe trace -------------------------------------------------------------

void save_probe_csv(const std::filesystem::path& path, const ContractionTrace& trace,
                    const std::vector<std::string>& comments = {});

}  // namespace nnarx
