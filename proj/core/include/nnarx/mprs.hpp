#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace nnarx {

/// Multilevel pseudo-random signal: piecewise-constant excitation whose
/// segment values are drawn uniformly from `levels` and whose hold times
/// are uniform integers in [hold_min, hold_max] samples.
struct MprsConfig {
    std::vector<double> levels;
    int hold_min = 5;
    int hold_max = 20;
    int length = 1250;
    std::uint64_t seed = 0;
};

/// Generate the excitation, truncated to exactly cfg.length samples.
/// Throws ConfigError for empty levels or inconsistent holds.
Eigen::VectorXd mprs_generate(const MprsConfig& cfg);

}  // namespace nnarx
