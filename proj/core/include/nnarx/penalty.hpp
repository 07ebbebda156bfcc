#pragma once

namespace nnarx {

/// Piecewise-linear hinge on the certificate residual. rho(nu) = 0 for
/// nu <= -margin and lambda * (nu + margin) above it, so the penalty turns
/// on before the certificate is lost. Continuous and nondecreasing; the
/// subgradient at the kink is taken as lambda.
struct PenaltyConfig {
    double lambda = 10.0;
    double margin = 0.01;
};

double penalty_rho(double nu, const PenaltyConfig& cfg);

/// Subgradient d rho / d nu (lambda on [-margin, inf), 0 below).
double penalty_slope(double nu, const PenaltyConfig& cfg);

}  // namespace nnarx
