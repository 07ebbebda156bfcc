#pragma once

#include <Eigen/Dense>

namespace nnarx {

/// Per-channel affine normalization: z = (x - mean) / scale, with scale the
/// maximum absolute deviation from the mean. Scales must be strictly
/// positive; normalize followed by denormalize is the identity to working
/// precision.
struct NormalizationStats {
    Eigen::VectorXd u_mean, u_scale;
    Eigen::VectorXd y_mean, y_scale;

    static NormalizationStats identity(int m, int p);

    void validate() const;  // throws NormalizationError on nonpositive scales

    Eigen::VectorXd normalize_u(const Eigen::VectorXd& u) const;
    Eigen::VectorXd denormalize_u(const Eigen::VectorXd& u) const;
    Eigen::VectorXd normalize_y(const Eigen::VectorXd& y) const;
    Eigen::VectorXd denormalize_y(const Eigen::VectorXd& y) const;

    /// Row-per-sample matrix forms.
    Eigen::MatrixXd normalize_u_rows(const Eigen::MatrixXd& u) const;
    Eigen::MatrixXd denormalize_u_rows(const Eigen::MatrixXd& u) const;
    Eigen::MatrixXd normalize_y_rows(const Eigen::MatrixXd& y) const;
    Eigen::MatrixXd denormalize_y_rows(const Eigen::MatrixXd& y) const;
};

}  // namespace nnarx
