#include "nnarx/canonical.hpp"

#include "nnarx/errors.hpp"

namespace nnarx {

CanonicalMatrices build_canonical_matrices(int N, int m, int p) {
    if (N < 1 || m < 1 || p < 1) {
        throw InvalidArgument("build_canonical_matrices: N, m, p must be >= 1");
    }
    const int b = m + p;
    const int n = b * N;

    CanonicalMatrices cm;
    cm.N = N;
    cm.m = m;
    cm.p = p;
    cm.A = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < N; ++i) {
        cm.A.block(i * b, (i + 1) * b, b, b).setIdentity();
    }

    cm.Bu = Eigen::MatrixXd::Zero(n, m);
    cm.Bu.block(n - m, 0, m, m).setIdentity();  // B~u = [0_{p x m}; I_m]

    cm.Bx = Eigen::MatrixXd::Zero(n, p);
    cm.Bx.block(n - b, 0, p, p).setIdentity();  // B~x = [I_p; 0_{m x p}]

    cm.C = Eigen::MatrixXd::Zero(p, n);
    cm.C.block(0, n - b, p, p).setIdentity();  // C~ = [I_p 0_{p x m}]

    return cm;
}

StackedState zero_state(int N, int m, int p) {
    if (N < 1 || m < 1 || p < 1) {
        throw InvalidArgument("zero_state: N, m, p must be >= 1");
    }
    StackedState s;
    s.N = N;
    s.m = m;
    s.p = p;
    s.x = Eigen::VectorXd::Zero((m + p) * N);
    return s;
}

StackedState stack_state(const std::vector<Eigen::VectorXd>& past_y,
                         const std::vector<Eigen::VectorXd>& past_u) {
    if (past_y.empty() || past_y.size() != past_u.size()) {
        throw InvalidArgument("stack_state: need the same nonzero number of past outputs and inputs");
    }
    const int N = static_cast<int>(past_y.size());
    const int p = static_cast<int>(past_y.front().size());
    const int m = static_cast<int>(past_u.front().size());
    if (p < 1 || m < 1) {
        throw InvalidArgument("stack_state: empty sample vectors");
    }
    for (const auto& y : past_y) {
        if (y.size() != p) throw InvalidArgument("stack_state: inconsistent output width");
    }
    for (const auto& u : past_u) {
        if (u.size() != m) throw InvalidArgument("stack_state: inconsistent input width");
    }

    StackedState s = zero_state(N, m, p);
    for (int i = 1; i <= N; ++i) {
        s.y_block(i) = past_y[static_cast<std::size_t>(i - 1)];
        s.u_block(i) = past_u[static_cast<std::size_t>(i - 1)];
    }
    return s;
}

}  // namespace nnarx
