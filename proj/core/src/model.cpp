#include "nnarx/model.hpp"

#include <string>

#include "nnarx/errors.hpp"

namespace nnarx {

void NnarxModel::validate() const {
    if (N < 1 || m < 1 || p < 1) {
        throw InvalidModel("NnarxModel: N, m, p must be >= 1");
    }
    ffnn.validate();
    if (ffnn.state_dim() != state_dim()) {
        throw InvalidModel("NnarxModel: first-layer input width must be (m+p)*N");
    }
    if (ffnn.input_dim() != m) {
        throw InvalidModel("NnarxModel: W columns must equal the input dimension");
    }
    if (ffnn.output_dim() != p) {
        throw InvalidModel("NnarxModel: rows(U_0) must equal the output dimension");
    }
    if (norm.u_mean.size() != m || norm.y_mean.size() != p) {
        throw InvalidModel("NnarxModel: normalization stats have wrong channel counts");
    }
    norm.validate();
}

std::pair<StackedState, Eigen::VectorXd> step(const NnarxModel& model,
                                              const StackedState& x,
                                              const Eigen::VectorXd& u) {
    if (x.N != model.N || x.m != model.m || x.p != model.p) {
        throw InvalidArgument("step: state dimensions do not match the model");
    }
    if (u.size() != model.m) {
        throw InvalidArgument("step: input width mismatch");
    }
    const int b = model.m + model.p;
    const int n = x.dim();

    const Eigen::VectorXd y = x.x.segment(n - b, model.p);  // C x
    const Eigen::VectorXd f = ffnn_forward(model.ffnn, x.x, u);

    StackedState next = x;
    if (model.N > 1) {
        next.x.head(n - b) = x.x.tail(n - b);  // shift blocks 2..N into 1..N-1
    }
    next.x.segment(n - b, model.p) = f;
    next.x.tail(model.m) = u;
    return {std::move(next), y};
}

Eigen::MatrixXd simulate_open_loop(const NnarxModel& model, const StackedState& x0,
                                   const Eigen::MatrixXd& u_seq) {
    if (u_seq.rows() == 0) {
        throw InvalidArgument("simulate_open_loop: empty input sequence");
    }
    if (u_seq.cols() != model.m) {
        throw InvalidArgument("simulate_open_loop: input width mismatch");
    }
    const Eigen::Index T = u_seq.rows();
    Eigen::MatrixXd out(T, model.p);

    StackedState x = x0;
    for (Eigen::Index k = 0; k < T; ++k) {
        auto [next, y_cur] = step(model, x, u_seq.row(k).transpose());
        (void)y_cur;
        x = std::move(next);
        out.row(k) = x.newest_output().transpose();  // predicted next output
        if (!out.row(k).allFinite() || !x.x.allFinite()) {
            throw NumericDivergence(
                "simulate_open_loop: non-finite value at step " + std::to_string(k),
                static_cast<std::size_t>(k));
        }
    }
    return out;
}

Eigen::MatrixXd predict_trajectory(const NnarxModel& model, const StackedState& x0,
                                   const Eigen::MatrixXd& u_seq) {
    if (u_seq.rows() == 0) {
        throw InvalidArgument("predict_trajectory: empty input sequence");
    }
    if (u_seq.cols() != model.m) {
        throw InvalidArgument("predict_trajectory: input width mismatch");
    }
    const Eigen::Index T = u_seq.rows();
    Eigen::MatrixXd out(T, model.p);
    out.row(0) = x0.newest_output().transpose();

    StackedState x = x0;
    for (Eigen::Index k = 1; k < T; ++k) {
        x = step(model, x, u_seq.row(k).transpose()).first;
        out.row(k) = x.newest_output().transpose();
        if (!out.row(k).allFinite() || !x.x.allFinite()) {
            throw NumericDivergence(
                "predict_trajectory: non-finite value at step " + std::to_string(k),
                static_cast<std::size_t>(k));
        }
    }
    return out;
}

}  // namespace nnarx
