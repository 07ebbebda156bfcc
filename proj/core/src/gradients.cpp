#include "nnarx/gradients.hpp"

#include <cmath>
#include <string>

#include "nnarx/certificate.hpp"
#include "nnarx/errors.hpp"

namespace nnarx {

ParamTensors ParamTensors::zeros_like(const FfnnParams& params) {
    ParamTensors t;
    t.layers.reserve(params.layers.size());
    for (const FfnnLayer& L : params.layers) {
        t.layers.push_back({Eigen::MatrixXd::Zero(L.W.rows(), L.W.cols()),
                            Eigen::MatrixXd::Zero(L.U.rows(), L.U.cols()),
                            Eigen::VectorXd::Zero(L.b.size())});
    }
    t.U0 = Eigen::MatrixXd::Zero(params.U0.rows(), params.U0.cols());
    t.b0 = Eigen::VectorXd::Zero(params.b0.size());
    return t;
}

double ParamTensors::squared_norm() const {
    double acc = U0.squaredNorm() + b0.squaredNorm();
    for (const LayerTensors& L : layers) {
        acc += L.W.squaredNorm() + L.U.squaredNorm() + L.b.squaredNorm();
    }
    return acc;
}

double ParamTensors::global_norm() const { return std::sqrt(squared_norm()); }

void ParamTensors::scale(double factor) {
    for (LayerTensors& L : layers) {
        L.W *= factor;
        L.U *= factor;
        L.b *= factor;
    }
    U0 *= factor;
    b0 *= factor;
}

bool ParamTensors::all_finite() const {
    for (const LayerTensors& L : layers) {
        if (!L.W.allFinite() || !L.U.allFinite() || !L.b.allFinite()) return false;
    }
    return U0.allFinite() && b0.allFinite();
}

namespace {

// Forward tape of one trajectory: states before each step plus the layer
// pre-/post-activations, enough to replay the chain rule backwards.
struct Tape {
    std::vector<Eigen::VectorXd> x_in;                 // x_{k-1} per step k = 1..T-1
    std::vector<std::vector<Eigen::VectorXd>> preact;  // v_i per step, per layer
    std::vector<std::vector<Eigen::VectorXd>> act;     // f_i per step, per layer
};

// Accumulates the data-term gradient of one trajectory into `out`, scaled
// by `weight` (1/batch size). Returns the trajectory's mean squared
// simulation error over the retained window.
double backprop_trajectory(const NnarxModel& model, const Trajectory& traj,
                           const StackedState& init, int washout, double weight,
                           ParamTensors& out) {
    const Eigen::Index T = traj.u.rows();
    if (traj.y.rows() != T) {
        throw InvalidArgument("gradients: input/output sample counts differ");
    }
    if (T <= washout) {
        throw InvalidArgument("gradients: trajectory not longer than the washout window");
    }
    const int M = model.ffnn.depth();
    const int n = model.state_dim();
    const int b = model.m + model.p;

    Tape tape;
    tape.x_in.resize(static_cast<std::size_t>(T));
    tape.preact.resize(static_cast<std::size_t>(T));
    tape.act.resize(static_cast<std::size_t>(T));

    Eigen::MatrixXd pred(T, model.p);
    pred.row(0) = init.newest_output().transpose();

    // forward with tape
    Eigen::VectorXd x = init.x;
    for (Eigen::Index k = 1; k < T; ++k) {
        const std::size_t ks = static_cast<std::size_t>(k);
        tape.x_in[ks] = x;
        tape.preact[ks].resize(static_cast<std::size_t>(M));
        tape.act[ks].resize(static_cast<std::size_t>(M));

        const Eigen::VectorXd u = traj.u.row(k).transpose();
        const Eigen::VectorXd* h = &x;
        for (int i = 0; i < M; ++i) {
            const FfnnLayer& L = model.ffnn.layers[static_cast<std::size_t>(i)];
            Eigen::VectorXd v = L.W * u + L.U * (*h) + L.b;
            Eigen::VectorXd f(v.size());
            for (Eigen::Index j = 0; j < v.size(); ++j) {
                f[j] = L.activation.apply(v[j]);
            }
            tape.preact[ks][static_cast<std::size_t>(i)] = std::move(v);
            tape.act[ks][static_cast<std::size_t>(i)] = std::move(f);
            h = &tape.act[ks][static_cast<std::size_t>(i)];
        }
        const Eigen::VectorXd fout = model.ffnn.U0 * (*h) + model.ffnn.b0;

        // canonical shift
        Eigen::VectorXd x_next(n);
        if (model.N > 1) x_next.head(n - b) = x.tail(n - b);
        x_next.segment(n - b, model.p) = fout;
        x_next.tail(model.m) = u;
        x = std::move(x_next);

        pred.row(k) = fout.transpose();
        if (!fout.allFinite()) {
            throw NumericDivergence("gradients: simulation diverged at step " + std::to_string(k),
                                    static_cast<std::size_t>(k));
        }
    }

    const double inv_window = 1.0 / static_cast<double>(T - washout);
    double data_loss = 0.0;
    for (Eigen::Index k = washout; k < T; ++k) {
        data_loss += (pred.row(k) - traj.y.row(k)).squaredNorm();
    }
    data_loss *= inv_window;

    // backward
    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(n);  // dL/dx_k via future steps
    const double err_scale = 2.0 * inv_window * weight;
    for (Eigen::Index k = T - 1; k >= 1; --k) {
        const std::size_t ks = static_cast<std::size_t>(k);

        // total adjoint of the regression output at step k: direct error
        // term plus the slot it occupies in x_k
        Eigen::VectorXd a = lambda.segment(n - b, model.p);
        if (k >= washout) {
            a += err_scale * (pred.row(k) - traj.y.row(k)).transpose();
        }

        const Eigen::VectorXd u = traj.u.row(k).transpose();
        Eigen::VectorXd delta = model.ffnn.U0.transpose() * a;
        out.U0.noalias() += a * tape.act[ks].back().transpose();
        out.b0 += a;
        for (int i = M - 1; i >= 0; --i) {
            const std::size_t is = static_cast<std::size_t>(i);
            const FfnnLayer& L = model.ffnn.layers[is];
            const Eigen::VectorXd& v = tape.preact[ks][is];
            Eigen::VectorXd dv(v.size());
            for (Eigen::Index j = 0; j < v.size(); ++j) {
                dv[j] = delta[j] * L.activation.slope(v[j]);
            }
            const Eigen::VectorXd& below =
                (i == 0) ? tape.x_in[ks] : tape.act[ks][is - 1];
            LayerTensors& g = out.layers[is];
            g.W.noalias() += dv * u.transpose();
            g.U.noalias() += dv * below.transpose();
            g.b += dv;
            delta = L.U.transpose() * dv;
        }

        // lambda_{k-1} = A' lambda_k + df'/dx * a
        Eigen::VectorXd lambda_prev = Eigen::VectorXd::Zero(n);
        if (model.N > 1) lambda_prev.tail(n - b) = lambda.head(n - b);
        lambda_prev += delta;
        lambda = std::move(lambda_prev);
    }

    return data_loss;
}

}  // namespace

BatchGradients gradients(const NnarxModel& model, const std::vector<Trajectory>& batch,
                         const std::vector<StackedState>& init_states, int washout,
                         const PenaltyConfig& penalty, double tol) {
    model.validate();
    if (washout < 0) {
        throw InvalidArgument("gradients: washout must be nonnegative");
    }
    if (batch.size() != init_states.size()) {
        throw InvalidArgument("gradients: one initial state per trajectory required");
    }

    BatchGradients result;
    result.grads = ParamTensors::zeros_like(model.ffnn);

    double data_loss = 0.0;
    if (!batch.empty()) {
        const double weight = 1.0 / static_cast<double>(batch.size());
        for (std::size_t t = 0; t < batch.size(); ++t) {
            data_loss += weight * backprop_trajectory(model, batch[t], init_states[t],
                                                      washout, weight, result.grads);
        }
    }

    // penalty subgradient through the spectral norms
    const int M = model.ffnn.depth();
    std::vector<SpectralResult> tops(static_cast<std::size_t>(M) + 1);
    tops[0] = spectral_norm_full(model.ffnn.U0, tol);
    double lipschitz_product = 1.0;
    double weight_product = tops[0].sigma;
    for (int i = 0; i < M; ++i) {
        tops[static_cast<std::size_t>(i) + 1] =
            spectral_norm_full(model.ffnn.layers[static_cast<std::size_t>(i)].U, tol);
        weight_product *= tops[static_cast<std::size_t>(i) + 1].sigma;
        lipschitz_product *= model.ffnn.layers[static_cast<std::size_t>(i)].activation.lipschitz;
    }
    const double nu =
        weight_product - 1.0 / (lipschitz_product * std::sqrt(static_cast<double>(model.N)));
    result.residual = nu;
    result.loss = data_loss + penalty_rho(nu, penalty);

    const double slope = penalty_slope(nu, penalty);
    if (slope > 0.0) {
        for (int i = 0; i <= M; ++i) {
            const std::size_t is = static_cast<std::size_t>(i);
            double others = 1.0;
            for (int j = 0; j <= M; ++j) {
                if (j != i) others *= tops[static_cast<std::size_t>(j)].sigma;
            }
            if (others == 0.0 || tops[is].left.size() == 0) continue;
            const Eigen::MatrixXd dnorm = tops[is].left * tops[is].right.transpose();
            if (i == 0) {
                result.grads.U0.noalias() += slope * others * dnorm;
            } else {
                result.grads.layers[is - 1].U.noalias() += slope * others * dnorm;
            }
        }
    }

    return result;
}

}  // namespace nnarx
