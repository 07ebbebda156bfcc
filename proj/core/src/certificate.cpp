#include "nnarx/certificate.hpp"

#include <cmath>

#include "nnarx/canonical.hpp"
#include "nnarx/errors.hpp"

namespace nnarx {

LipschitzConstants compute_constants(const FfnnParams& params, double tol) {
    params.validate();
    const int M = params.depth();

    std::vector<double> u_norms(static_cast<std::size_t>(M));  // ||U_1||..||U_M||
    std::vector<double> w_norms(static_cast<std::size_t>(M));
    std::vector<double> lips(static_cast<std::size_t>(M));
    for (int i = 0; i < M; ++i) {
        u_norms[i] = spectral_norm(params.layers[i].U, tol);
        w_norms[i] = spectral_norm(params.layers[i].W, tol);
        lips[i] = params.layers[i].activation.lipschitz;
    }
    const double u0_norm = spectral_norm(params.U0, tol);

    LipschitzConstants k;
    double kx = u0_norm;
    for (int i = 0; i < M; ++i) {
        kx *= lips[i] * u_norms[i];
    }
    k.K_x = kx;

    // suffix products prod_{j=i+1..M} L_j ||U_j||
    std::vector<double> suffix(static_cast<std::size_t>(M) + 1, 1.0);
    for (int i = M - 1; i >= 0; --i) {
        suffix[i] = suffix[i + 1] * lips[i] * u_norms[i];
    }
    double ku = 0.0, kb = 0.0;
    for (int i = 0; i < M; ++i) {
        ku += suffix[i + 1] * lips[i] * w_norms[i];
        kb += suffix[i + 1] * lips[i];
    }
    k.K_u = u0_norm * ku;
    k.K_b = u0_norm * kb;
    return k;
}

double stability_residual(const NnarxModel& model, double tol) {
    model.validate();
    double weight_product = spectral_norm(model.ffnn.U0, tol);
    double lipschitz_product = 1.0;
    for (const FfnnLayer& L : model.ffnn.layers) {
        weight_product *= spectral_norm(L.U, tol);
        lipschitz_product *= L.activation.lipschitz;
    }
    return weight_product - 1.0 / (lipschitz_product * std::sqrt(static_cast<double>(model.N)));
}

CertificateReport certify(const NnarxModel& model, double tol) {
    model.validate();  // rejects NaN weights via FfnnParams::validate

    CertificateReport rep;
    rep.look_back = model.N;
    rep.spectral_norms.reserve(static_cast<std::size_t>(model.ffnn.depth()) + 1);
    rep.spectral_norms.push_back(spectral_norm(model.ffnn.U0, tol));
    rep.weight_product = rep.spectral_norms.front();
    for (const FfnnLayer& L : model.ffnn.layers) {
        const double s = spectral_norm(L.U, tol);
        rep.spectral_norms.push_back(s);
        rep.weight_product *= s;
        rep.lipschitz_product *= L.activation.lipschitz;
    }
    rep.threshold = 1.0 / (rep.lipschitz_product * std::sqrt(static_cast<double>(model.N)));
    rep.residual = rep.weight_product - rep.threshold;
    rep.verdict = rep.residual < 0.0 ? Verdict::CertifiedIssAndDeltaIss
                                     : Verdict::NotCertified;
    rep.constants = compute_constants(model.ffnn, tol);
    return rep;
}

LyapunovMatrix lyapunov_matrix(int N, int m, int p) {
    if (N < 1 || m < 1 || p < 1) {
        throw InvalidArgument("lyapunov_matrix: N, m, p must be >= 1");
    }
    const int b = m + p;
    const int n = b * N;

    // exact integer arithmetic for both construction and verification
    Eigen::MatrixXi P = Eigen::MatrixXi::Zero(n, n);
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < b; ++j) {
            P(i * b + j, i * b + j) = i + 1;
        }
    }
    Eigen::MatrixXi A = Eigen::MatrixXi::Zero(n, n);
    for (int i = 0; i + 1 < N; ++i) {
        for (int j = 0; j < b; ++j) {
            A(i * b + j, (i + 1) * b + j) = 1;
        }
    }
    const Eigen::MatrixXi lhs = A.transpose() * P * A - P;
    const Eigen::MatrixXi expected = -Eigen::MatrixXi::Identity(n, n);
    if (lhs != expected) {
        throw InternalError("lyapunov_matrix: A'PA - P != -I");
    }

    LyapunovMatrix L;
    L.N = N;
    L.m = m;
    L.p = p;
    L.P = P.cast<double>();
    return L;
}

}  // namespace nnarx
