#include "nnarx/normalization.hpp"

#include "nnarx/errors.hpp"

namespace nnarx {

namespace {

Eigen::MatrixXd apply_rows(const Eigen::MatrixXd& rows, const Eigen::VectorXd& mean,
                           const Eigen::VectorXd& scale, bool forward) {
    if (rows.cols() != mean.size()) {
        throw InvalidArgument("normalization: channel count mismatch");
    }
    Eigen::MatrixXd out(rows.rows(), rows.cols());
    for (Eigen::Index c = 0; c < rows.cols(); ++c) {
        if (forward) {
            out.col(c) = (rows.col(c).array() - mean[c]) / scale[c];
        } else {
            out.col(c) = rows.col(c).array() * scale[c] + mean[c];
        }
    }
    return out;
}

}  // namespace

NormalizationStats NormalizationStats::identity(int m, int p) {
    NormalizationStats s;
    s.u_mean = Eigen::VectorXd::Zero(m);
    s.u_scale = Eigen::VectorXd::Ones(m);
    s.y_mean = Eigen::VectorXd::Zero(p);
    s.y_scale = Eigen::VectorXd::Ones(p);
    return s;
}

void NormalizationStats::validate() const {
    if (u_mean.size() != u_scale.size() || y_mean.size() != y_scale.size()) {
        throw NormalizationError("normalization stats: mean/scale size mismatch");
    }
    if ((u_scale.array() <= 0.0).any() || (y_scale.array() <= 0.0).any()) {
        throw NormalizationError("normalization stats: scales must be strictly positive");
    }
    if (!u_mean.allFinite() || !u_scale.allFinite() || !y_mean.allFinite() ||
        !y_scale.allFinite()) {
        throw NormalizationError("normalization stats: non-finite entry");
    }
}

Eigen::VectorXd NormalizationStats::normalize_u(const Eigen::VectorXd& u) const {
    return ((u - u_mean).array() / u_scale.array()).matrix();
}
Eigen::VectorXd NormalizationStats::denormalize_u(const Eigen::VectorXd& u) const {
    return (u.array() * u_scale.array()).matrix() + u_mean;
}
Eigen::VectorXd NormalizationStats::normalize_y(const Eigen::VectorXd& y) const {
    return ((y - y_mean).array() / y_scale.array()).matrix();
}
Eigen::VectorXd NormalizationStats::denormalize_y(const Eigen::VectorXd& y) const {
    return (y.array() * y_scale.array()).matrix() + y_mean;
}

Eigen::MatrixXd NormalizationStats::normalize_u_rows(const Eigen::MatrixXd& u) const {
    return apply_rows(u, u_mean, u_scale, true);
}
Eigen::MatrixXd NormalizationStats::denormalize_u_rows(const Eigen::MatrixXd& u) const {
    return apply_rows(u, u_mean, u_scale, false);
}
Eigen::MatrixXd NormalizationStats::normalize_y_rows(const Eigen::MatrixXd& y) const {
    return apply_rows(y, y_mean, y_scale, true);
}
Eigen::MatrixXd NormalizationStats::denormalize_y_rows(const Eigen::MatrixXd& y) const {
    return apply_rows(y, y_mean, y_scale, false);
}

}  // namespace nnarx
