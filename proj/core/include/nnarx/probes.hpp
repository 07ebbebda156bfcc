#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <vector>

#include "nnarx/canonical.hpp"
#include "nnarx/model.hpp"

namespace nnarx {

// Numerical probes that corroborate the certificate empirically. They are
// corroboration, not proof: a model failing them is unstable, a model
// passing them is merely consistent with the certified contraction.

/// One evaluation of the incremental Lyapunov decrease. `delta_v` is the
/// exact change of V = (x_a - x_b)' P (x_a - x_b) over one step;
/// `bound` is -||dx||^2 + N ||du||^2 + N ||df||^2, which the canonical
/// structure makes an exact expansion of the same quantity, so the slack
/// is zero up to rounding.
struct ProbeRecord {
    double delta_v = 0.0;
    double bound = 0.0;
    double slack = 0.0;  // bound - delta_v
};

/// Evaluate the incremental Lyapunov decrease for one state/input pair.
/// Requires a certified model unless `allow_uncertified` is set.
ProbeRecord lyapunov_decrease_probe(const NnarxModel& model, const StackedState& x_a,
                                    const StackedState& x_b, const Eigen::VectorXd& u_a,
                                    const Eigen::VectorXd& u_b,
                                    bool allow_uncertified = false);

/// Distance trace of two trajectories under a shared input sequence.
/// `distance[k]` is ||x_a,k - x_b,k||; entry 0 is the initial distance.
/// If the simulation blows up the trace stops early and `diverged_at`
/// carries the step index -- expected for unstable models, not a failure
/// of the probe.
struct ContractionTrace {
    std::vector<double> distance;
    std::optional<std::size_t> diverged_at;

    double initial_distance() const { return distance.front(); }
    double final_distance() const { return distance.back(); }
};

ContractionTrace contraction_probe(const NnarxModel& model, const StackedState& x_a0,
                                   const StackedState& x_b0, const Eigen::MatrixXd& u_seq,
                                   int horizon);

}  // namespace nnarx
