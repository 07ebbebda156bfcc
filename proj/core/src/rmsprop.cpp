#include "nnarx/rmsprop.hpp"

#include <cmath>

#include "nnarx/errors.hpp"

namespace nnarx {

namespace {

template <typename Tensor>
void update_tensor(Tensor& theta, const Tensor& g, Tensor& v, double clip_factor,
                   const RmspropConfig& cfg) {
    if (theta.rows() != g.rows() || theta.cols() != g.cols()) {
        throw InvalidArgument("rmsprop_step: gradient shape mismatch");
    }
    const auto gc = (g.array() * clip_factor).eval();
    v.array() = cfg.decay * v.array() + (1.0 - cfg.decay) * gc.square();
    theta.array() -= cfg.learning_rate * gc / (v.array().sqrt() + cfg.epsilon);
}

}  // namespace

void rmsprop_step(FfnnParams& params, const ParamTensors& grads, RmspropState& state,
                  const RmspropConfig& cfg) {
    if (grads.layers.size() != params.layers.size() ||
        state.v.layers.size() != params.layers.size()) {
        throw InvalidArgument("rmsprop_step: layer count mismatch");
    }
    double clip_factor = 1.0;
    if (cfg.clip_norm.has_value()) {
        const double gn = grads.global_norm();
        if (gn > *cfg.clip_norm && gn > 0.0) {
            clip_factor = *cfg.clip_norm / gn;
        }
    }
    for (std::size_t i = 0; i < params.layers.size(); ++i) {
        update_tensor(params.layers[i].W, grads.layers[i].W, state.v.layers[i].W,
                      clip_factor, cfg);
        update_tensor(params.layers[i].U, grads.layers[i].U, state.v.layers[i].U,
                      clip_factor, cfg);
        update_tensor(params.layers[i].b, grads.layers[i].b, state.v.layers[i].b,
                      clip_factor, cfg);
    }
    update_tensor(params.U0, grads.U0, state.v.U0, clip_factor, cfg);
    update_tensor(params.b0, grads.b0, state.v.b0, clip_factor, cfg);
}

}  // namespace nnarx
