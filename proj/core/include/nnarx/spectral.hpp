#pragma once

#include <Eigen/Dense>

namespace nnarx {

/// Result of a converged power iteration: the largest singular value and
/// the corresponding singular pair (sigma, left, right) with
/// M * right = sigma * left.
struct SpectralResult {
    double sigma = 0.0;
    Eigen::VectorXd left;
    Eigen::VectorXd right;
    int iterations = 0;
};

inline constexpr double kSpectralTol = 1e-10;
inline constexpr int kSpectralMaxIter = 10000;

/// Largest singular value of `mat` via power iteration on mat' * mat with a
/// deterministic start vector. Converges to relative tolerance `tol`;
/// throws ConvergenceFailure (carrying the best estimate) if the iteration
/// cap is reached first.
double spectral_norm(const Eigen::MatrixXd& mat, double tol = kSpectralTol,
                     int max_iter = kSpectralMaxIter);

/// Same iteration, additionally returning the top singular pair. The pair
/// feeds the penalty gradient: d||U||/dU = left * right'. For a repeated
/// top singular value the returned pair is the one the iteration found;
/// any such pair is a valid subgradient choice.
SpectralResult spectral_norm_full(const Eigen::MatrixXd& mat, double tol = kSpectralTol,
                                  int max_iter = kSpectralMaxIter);

}  // namespace nnarx
