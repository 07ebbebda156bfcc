#pragma once

#include <Eigen/Dense>
#include <filesystem>

#include "nnarx/plant.hpp"

namespace nnarx {

/// Parameters of the two-tank pH neutralization process: a stirred tank
/// receiving an acid stream q1, a buffer stream q2 and a controlled
/// alkaline stream u = q3, with the effluent pH measured. States are the
/// two reaction invariants of the tank content and the liquid level. The
/// structure follows the standard benchmark model (Hall 1989); the numeric
/// parameter values are NOT shipped -- populate them from the literature
/// via a parameter file.
struct PhParams {
    double tank_area = 0.0;       // cross section of the measuring tank
    double valve_coeff = 0.0;     // outflow q4 = valve_coeff * (h + outlet_offset)^valve_exponent
    double valve_exponent = 0.5;
    double outlet_offset = 0.0;
    double q1 = 0.0;              // fixed acid flow
    double q2 = 0.0;              // fixed buffer flow
    double wa1 = 0.0, wa2 = 0.0, wa3 = 0.0;  // acid invariants of streams 1..3
    double wb1 = 0.0, wb2 = 0.0, wb3 = 0.0;  // buffer invariants of streams 1..3
    double pk1 = 6.35;            // log10 dissociation constants of the buffer
    double pk2 = 10.25;
    double u_min = 0.0;           // admissible alkaline flow range
    double u_max = 1.0;

    void validate() const;  // throws ConfigError on nonphysical values
};

/// Load parameters from a JSON key-value file. A missing file raises
/// ConfigError with a pointer to the cited literature; unknown or missing
/// keys raise SchemaError.
PhParams load_ph_params(const std::filesystem::path& path);
void save_ph_params(const std::filesystem::path& path, const PhParams& params);

/// Third-order continuous-time pH plant. States x = [wa4, wb4, h]; the
/// output map solves the implicit charge balance for the pH by bisection.
class PhPlant final : public ContinuousPlant {
public:
    explicit PhPlant(PhParams params);

    std::string name() const override { return "ph"; }
    int state_dim() const override { return 3; }
    std::pair<double, double> input_range() const override;
    Eigen::VectorXd derivative(const Eigen::VectorXd& state, double u) const override;
    double output(const Eigen::VectorXd& state, double u) const override;

    const PhParams& params() const { return params_; }

private:
    PhParams params_;
};

/// Integrate the plant with fixed-step RK4 at sampling_time, using
/// `inner_steps` sub-steps per sample, and return the pH per sample.
/// A zero-length input yields a zero-length output.
Eigen::VectorXd ph_plant_simulate(const PhParams& params, const Eigen::VectorXd& x0,
                                  const Eigen::VectorXd& u_seq, double sampling_time,
                                  int inner_steps = 10);

}  // namespace nnarx
