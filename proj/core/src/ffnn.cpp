#include "nnarx/ffnn.hpp"

#include "nnarx/errors.hpp"

namespace nnarx {

void FfnnParams::validate() const {
    if (layers.empty()) {
        throw InvalidModel("FfnnParams: at least one hidden layer required");
    }
    const int m = static_cast<int>(layers.front().W.cols());
    Eigen::Index prev_width = layers.front().U.cols();  // h_0 = n
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const FfnnLayer& L = layers[i];
        if (L.W.cols() != m) {
            throw InvalidModel("FfnnParams: every W_i must have m columns");
        }
        if (L.W.rows() != L.U.rows() || L.b.size() != L.U.rows()) {
            throw InvalidModel("FfnnParams: W_i, U_i, b_i row counts disagree");
        }
        if (i > 0 && L.U.cols() != prev_width) {
            throw InvalidModel("FfnnParams: columns(U_i) must equal rows(U_{i-1})");
        }
        if (L.activation.f == nullptr || L.activation.df == nullptr) {
            throw InvalidModel("FfnnParams: layer has no activation");
        }
        prev_width = L.U.rows();
    }
    if (U0.cols() != prev_width) {
        throw InvalidModel("FfnnParams: columns(U_0) must equal rows(U_M)");
    }
    if (b0.size() != U0.rows()) {
        throw InvalidModel("FfnnParams: b_0 length must equal rows(U_0)");
    }
    if (!all_finite()) {
        throw InvalidModel("FfnnParams: non-finite weight or bias");
    }
}

bool FfnnParams::all_finite() const {
    for (const FfnnLayer& L : layers) {
        if (!L.W.allFinite() || !L.U.allFinite() || !L.b.allFinite()) return false;
    }
    return U0.allFinite() && b0.allFinite();
}

Eigen::VectorXd ffnn_forward(const FfnnParams& params, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& u) {
    if (params.layers.empty()) {
        throw InvalidModel("ffnn_forward: empty network");
    }
    if (x.size() != params.state_dim()) {
        throw InvalidArgument("ffnn_forward: state width mismatch");
    }
    if (u.size() != params.input_dim()) {
        throw InvalidArgument("ffnn_forward: input width mismatch");
    }

    Eigen::VectorXd h = x;
    for (const FfnnLayer& L : params.layers) {
        Eigen::VectorXd v = L.W * u + L.U * h + L.b;
        for (Eigen::Index j = 0; j < v.size(); ++j) {
            v[j] = L.activation.apply(v[j]);
        }
        h = std::move(v);
    }
    return params.U0 * h + params.b0;
}

}  // namespace nnarx
