#include "nnarx/metrics.hpp"

#include <cmath>
#include <future>

#include "nnarx/certificate.hpp"
#include "nnarx/errors.hpp"

namespace nnarx {

double fit_index(const Eigen::MatrixXd& y_pred, const Eigen::MatrixXd& y_true) {
    if (y_pred.rows() != y_true.rows() || y_pred.cols() != y_true.cols()) {
        throw InvalidArgument("fit_index: shape mismatch");
    }
    if (y_true.rows() < 2) {
        throw InvalidArgument("fit_index: need at least two samples");
    }
    const Eigen::RowVectorXd mean = y_true.colwise().mean();
    const double denom = (y_true.rowwise() - mean).norm();
    if (denom == 0.0) {
        throw UndefinedDenominator("fit_index: reference signal is constant");
    }
    const double num = (y_pred - y_true).norm();
    return 100.0 * (1.0 - num / denom);
}

namespace {

TrajectoryEval score_window(int id, const Eigen::MatrixXd& pred,
                            const Eigen::MatrixXd& truth) {
    TrajectoryEval ev;
    ev.trajectory_id = id;
    ev.fit = fit_index(pred, truth);
    ev.fit_per_channel.resize(static_cast<std::size_t>(truth.cols()));
    for (Eigen::Index c = 0; c < truth.cols(); ++c) {
        ev.fit_per_channel[static_cast<std::size_t>(c)] =
            fit_index(pred.col(c), truth.col(c));
    }
    const Eigen::MatrixXd err = pred - truth;
    ev.rmse = std::sqrt(err.squaredNorm() /
                        static_cast<double>(err.rows() * err.cols()));
    ev.max_abs_error = err.array().abs().maxCoeff();
    return ev;
}

}  // namespace

EvalReport evaluate(const NnarxModel& model, const Dataset& dataset, Split split,
                    int washout, int threads) {
    model.validate();
    const auto view = dataset.split_view(split);
    if (view.empty()) {
        throw ConfigError("evaluate: split has no trajectories");
    }
    if (washout < 0) {
        throw InvalidArgument("evaluate: washout must be nonnegative");
    }

    EvalReport report;
    report.split = split;
    report.washout = washout;

    struct PerTraj {
        TrajectoryEval ev;
        Eigen::MatrixXd pred_window, true_window;
    };
    std::vector<PerTraj> rows(view.size());

    auto eval_one = [&](std::size_t i) {
        const DatasetTrajectory& t = *view[i];
        const Eigen::Index T = t.data.length();
        if (T <= washout) {
            throw InvalidArgument("evaluate: trajectory not longer than the washout window");
        }
        PerTraj& row = rows[i];
        row.ev.trajectory_id = t.id;
        try {
            const Eigen::MatrixXd u_n = dataset.norm.normalize_u_rows(t.data.u);
            const Eigen::MatrixXd pred_n =
                predict_trajectory(model, model.zero_state(), u_n);
            const Eigen::MatrixXd pred = dataset.norm.denormalize_y_rows(pred_n);
            row.pred_window = pred.bottomRows(T - washout);
            row.true_window = t.data.y.bottomRows(T - washout);
            row.ev = score_window(t.id, row.pred_window, row.true_window);
        } catch (const NumericDivergence&) {
            row.ev.diverged = true;
        }
    };

    if (threads > 1 && view.size() > 1) {
        std::vector<std::future<void>> futures;
        futures.reserve(view.size());
        for (std::size_t i = 0; i < view.size(); ++i) {
            futures.push_back(std::async(std::launch::async, eval_one, i));
        }
        for (auto& f : futures) f.get();
    } else {
        for (std::size_t i = 0; i < view.size(); ++i) eval_one(i);
    }

    Eigen::Index total_rows = 0;
    for (const PerTraj& row : rows) {
        report.per_trajectory.push_back(row.ev);
        if (row.ev.diverged) {
            ++report.diverged_count;
        } else {
            total_rows += row.pred_window.rows();
        }
    }

    if (total_rows > 0) {
        const Eigen::Index p = model.p;
        Eigen::MatrixXd all_pred(total_rows, p), all_true(total_rows, p);
        Eigen::Index at = 0;
        for (const PerTraj& row : rows) {
            if (row.ev.diverged) continue;
            all_pred.middleRows(at, row.pred_window.rows()) = row.pred_window;
            all_true.middleRows(at, row.true_window.rows()) = row.true_window;
            at += row.pred_window.rows();
        }
        const TrajectoryEval agg = score_window(-1, all_pred, all_true);
        report.aggregate_fit = agg.fit;
        report.aggregate_fit_per_channel = agg.fit_per_channel;
        report.aggregate_rmse = agg.rmse;
        report.aggregate_max_abs_error = agg.max_abs_error;
    }

    const CertificateReport cert = certify(model);
    report.certified = cert.certified();
    report.residual = cert.residual;
    return report;
}

}  // namespace nnarx
