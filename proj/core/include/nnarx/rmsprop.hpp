#pragma once

#include <optional>

#include "nnarx/ffnn.hpp"
#include "nnarx/gradients.hpp"

namespace nnarx {

struct RmspropConfig {
    double learning_rate = 1e-3;
    double decay = 0.9;
    double epsilon = 1e-8;
    std::optional<double> clip_norm = 1.0;  // global gradient-norm clip, nullopt disables
};

/// Elementwise second-moment accumulator, zero-initialized.
struct RmspropState {
    ParamTensors v;

    static RmspropState init(const FfnnParams& params) {
        return RmspropState{ParamTensors::zeros_like(params)};
    }
};

/// One RMSProp update: v <- decay v + (1-decay) g^2, theta <- theta -
/// lr g / (sqrt(v) + eps). Global norm clipping, when enabled, rescales g
/// before both updates.
void rmsprop_step(FfnnParams& params, const ParamTensors& grads, RmspropState& state,
                  const RmspropConfig& cfg);

}  // namespace nnarx
