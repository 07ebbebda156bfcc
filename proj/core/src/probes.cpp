#include "nnarx/probes.hpp"

#include <cmath>

#include "nnarx/certificate.hpp"
#include "nnarx/errors.hpp"

namespace nnarx {

ProbeRecord lyapunov_decrease_probe(const NnarxModel& model, const StackedState& x_a,
                                    const StackedState& x_b, const Eigen::VectorXd& u_a,
                                    const Eigen::VectorXd& u_b, bool allow_uncertified) {
    if (x_a.dim() != model.state_dim() || x_b.dim() != model.state_dim()) {
        throw InvalidArgument("lyapunov_decrease_probe: state dimension mismatch");
    }
    if (u_a.size() != model.m || u_b.size() != model.m) {
        throw InvalidArgument("lyapunov_decrease_probe: input width mismatch");
    }
    if (!allow_uncertified && stability_residual(model) >= 0.0) {
        throw InvalidArgument(
            "lyapunov_decrease_probe: model is not certified; pass allow_uncertified to override");
    }

    const LyapunovMatrix lyap = lyapunov_matrix(model.N, model.m, model.p);
    const double N = static_cast<double>(model.N);

    const Eigen::VectorXd dx = x_a.x - x_b.x;
    const double v_before = dx.dot(lyap.P * dx);

    auto [xa_next, ya] = step(model, x_a, u_a);
    auto [xb_next, yb] = step(model, x_b, u_b);
    (void)ya;
    (void)yb;
    const Eigen::VectorXd dx_next = xa_next.x - xb_next.x;
    const double v_after = dx_next.dot(lyap.P * dx_next);

    const Eigen::VectorXd df =
        ffnn_forward(model.ffnn, x_a.x, u_a) - ffnn_forward(model.ffnn, x_b.x, u_b);
    const Eigen::VectorXd du = u_a - u_b;

    ProbeRecord rec;
    rec.delta_v = v_after - v_before;
    rec.bound = -dx.squaredNorm() + N * du.squaredNorm() + N * df.squaredNorm();
    rec.slack = rec.bound - rec.delta_v;
    return rec;
}

ContractionTrace contraction_probe(const NnarxModel& model, const StackedState& x_a0,
                                   const StackedState& x_b0, const Eigen::MatrixXd& u_seq,
                                   int horizon) {
    if (horizon < 1) {
        throw InvalidArgument("contraction_probe: horizon must be >= 1");
    }
    if (u_seq.rows() < horizon) {
        throw InvalidArgument("contraction_probe: input sequence shorter than horizon");
    }
    if (u_seq.cols() != model.m) {
        throw InvalidArgument("contraction_probe: input width mismatch");
    }

    ContractionTrace trace;
    trace.distance.reserve(static_cast<std::size_t>(horizon) + 1);

    StackedState xa = x_a0;
    StackedState xb = x_b0;
    trace.distance.push_back((xa.x - xb.x).norm());

    for (int k = 0; k < horizon; ++k) {
        const Eigen::VectorXd u = u_seq.row(k).transpose();
        xa = step(model, xa, u).first;
        xb = step(model, xb, u).first;
        const double d = (xa.x - xb.x).norm();
        if (!std::isfinite(d) || !xa.x.allFinite() || !xb.x.allFinite()) {
            trace.diverged_at = static_cast<std::size_t>(k);
            trace.distance.push_back(d);
            return trace;
        }
        trace.distance.push_back(d);
    }
    return trace;
}

}  // namespace nnarx
