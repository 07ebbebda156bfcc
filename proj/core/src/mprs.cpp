#include "nnarx/mprs.hpp"

#include "nnarx/errors.hpp"
#include "nnarx/rng.hpp"

namespace nnarx {

Eigen::VectorXd mprs_generate(const MprsConfig& cfg) {
    if (cfg.levels.empty()) {
        throw ConfigError("mprs_generate: at least one level required");
    }
    if (cfg.hold_min < 1 || cfg.hold_max < cfg.hold_min) {
        throw ConfigError("mprs_generate: need 1 <= hold_min <= hold_max");
    }
    if (cfg.length < 1) {
        throw ConfigError("mprs_generate: length must be >= 1");
    }

    Rng rng(cfg.seed);
    Eigen::VectorXd u(cfg.length);
    int k = 0;
    while (k < cfg.length) {
        const auto level_idx = static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(cfg.levels.size()) - 1));
        const int hold = static_cast<int>(rng.uniform_int(cfg.hold_min, cfg.hold_max));
        for (int i = 0; i < hold && k < cfg.length; ++i, ++k) {
            u[k] = cfg.levels[level_idx];
        }
    }
    return u;
}

}  // namespace nnarx
