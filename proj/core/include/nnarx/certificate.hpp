#pragma once

#include <Eigen/Dense>
#include <vector>

#include "nnarx/ffnn.hpp"
#include "nnarx/model.hpp"
#include "nnarx/spectral.hpp"

namespace nnarx {

// Stability certificate for NNARX models in canonical form. The model is
// input-to-state stable, and incrementally so, whenever
//
//     prod_{i=0..M} ||U_i||  <  1 / (prod_{i=1..M} L_i * sqrt(N)),
//
// an inequality on the spectral norms of the state-path weights and the
// activation Lipschitz constants. The residual nu is the left side minus
// the right side; nu < 0 (strictly) certifies both properties. The
// condition is sufficient, not necessary: a model that fails it is merely
// "not certified".

/// Lipschitz-type constants of the network with respect to state, input
/// and biases.
struct LipschitzConstants {
    double K_x = 0.0;
    double K_u = 0.0;
    double K_b = 0.0;
};

/// K_x = ||U_0|| prod_i L_i ||U_i||,
/// K_u = ||U_0|| sum_i (prod_{j>i} L_j ||U_j||) L_i ||W_i||,
/// K_b likewise with ||W_i|| replaced by 1.
LipschitzConstants compute_constants(const FfnnParams& params,
                                     double tol = kSpectralTol);

/// Certificate residual nu = prod ||U_i|| - 1/((prod L_i) sqrt(N)).
double stability_residual(const NnarxModel& model, double tol = kSpectralTol);

enum class Verdict { CertifiedIssAndDeltaIss, NotCertified };

/// Full audit trail of one certificate evaluation.
struct CertificateReport {
    std::vector<double> spectral_norms;  // ||U_0||, ||U_1||, ..., ||U_M||
    double lipschitz_product = 1.0;      // prod_{i=1..M} L_i
    double weight_product = 0.0;         // prod_{i=0..M} ||U_i||
    double threshold = 0.0;              // 1 / (lipschitz_product * sqrt(N))
    double residual = 0.0;               // nu = weight_product - threshold
    Verdict verdict = Verdict::NotCertified;
    LipschitzConstants constants;
    int look_back = 0;

    bool certified() const { return verdict == Verdict::CertifiedIssAndDeltaIss; }
};

/// Evaluate the certificate. The verdict is CertifiedIssAndDeltaIss iff
/// nu < 0 strictly. Throws InvalidModel on non-finite weights.
CertificateReport certify(const NnarxModel& model, double tol = kSpectralTol);

/// Block-diagonal Lyapunov matrix P = diag(I, 2 I, ..., N I) with block
/// size (m+p), solving A' P A - P = -I for the canonical shift matrix A.
struct LyapunovMatrix {
    Eigen::MatrixXd P;
    int N = 0;
    int m = 0;
    int p = 0;
};

/// Build P and verify the Lyapunov identity exactly (integer arithmetic)
/// before returning. A verification failure throws InternalError.
LyapunovMatrix lyapunov_matrix(int N, int m, int p);

}  // namespace nnarx
