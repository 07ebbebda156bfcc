#include "nnarx/spectral.hpp"

#include <cmath>

#include "nnarx/errors.hpp"
#include "nnarx/rng.hpp"

namespace nnarx {

namespace {

// Fixed-seed start vector: dense in every direction with probability 1,
// identical across runs.
Eigen::VectorXd start_vector(Eigen::Index size) {
    Rng rng(0x5eedf00dULL);
    Eigen::VectorXd v(size);
    for (Eigen::Index i = 0; i < size; ++i) {
        v[i] = rng.uniform(-1.0, 1.0);
    }
    const double norm = v.norm();
    return v / (norm > 0.0 ? norm : 1.0);
}

}  // namespace

SpectralResult spectral_norm_full(const Eigen::MatrixXd& mat, double tol, int max_iter) {
    if (!mat.allFinite()) {
        throw InvalidArgument("spectral_norm: non-finite entries");
    }
    if (!(tol > 0.0)) {
        throw InvalidArgument("spectral_norm: tol must be positive");
    }
    SpectralResult res;
    if (mat.rows() == 0 || mat.cols() == 0) {
        return res;
    }

    Eigen::VectorXd v = start_vector(mat.cols());
    Eigen::VectorXd mv = mat * v;
    double sigma = mv.norm();
    if (sigma == 0.0) {
        // start vector in the kernel; one re-orientation along the largest row
        Eigen::Index r;
        mat.rowwise().norm().maxCoeff(&r);
        if (mat.row(r).norm() == 0.0) {
            res.right = v;
            res.left = Eigen::VectorXd::Zero(mat.rows());
            return res;  // zero matrix
        }
        v = mat.row(r).transpose().normalized();
        mv = mat * v;
        sigma = mv.norm();
    }

    // The sigma estimate ||M v|| is second-order accurate in the angle
    // between v and the top right singular vector, so driving the vector
    // change below sqrt(2 tol) already bounds the value error by tol.
    const double vec_tol = std::sqrt(2.0 * tol);
    for (int it = 1; it <= max_iter; ++it) {
        Eigen::VectorXd w = mat.transpose() * mv;  // (mat' mat) v
        const double wn = w.norm();
        if (wn == 0.0) {
            res.sigma = 0.0;
            res.right = v;
            res.left = Eigen::VectorXd::Zero(mat.rows());
            res.iterations = it;
            return res;
        }
        Eigen::VectorXd v_next = w / wn;
        mv = mat * v_next;
        const double sigma_next = mv.norm();

        const double vec_change = (v_next - v).norm();
        const double val_change = std::abs(sigma_next - sigma);
        v = std::move(v_next);
        sigma = sigma_next;
        if (vec_change <= vec_tol && val_change <= tol * std::max(sigma, 1e-300)) {
            res.sigma = sigma;
            res.right = v;
            res.left = sigma > 0.0 ? Eigen::VectorXd(mv / sigma)
                                   : Eigen::VectorXd::Zero(mat.rows());
            res.iterations = it;
            return res;
        }
    }
    throw ConvergenceFailure("spectral_norm: power iteration did not converge", sigma);
}

double spectral_norm(const Eigen::MatrixXd& mat, double tol, int max_iter) {
    return spectral_norm_full(mat, tol, max_iter).sigma;
}

}  // namespace nnarx
