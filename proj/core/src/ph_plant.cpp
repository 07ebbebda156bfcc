#include "nnarx/ph_plant.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "nnarx/errors.hpp"

namespace nnarx {

void PhParams::validate() const {
    if (!(tank_area > 0.0)) throw ConfigError("PhParams: tank_area must be positive");
    if (!(valve_coeff > 0.0)) throw ConfigError("PhParams: valve_coeff must be positive");
    if (!(q1 >= 0.0) || !(q2 >= 0.0)) throw ConfigError("PhParams: flows must be nonnegative");
    if (!(u_max > u_min)) throw ConfigError("PhParams: u_max must exceed u_min");
}

namespace {

constexpr const char* kKeys[] = {"tank_area", "valve_coeff", "valve_exponent",
                                 "outlet_offset", "q1", "q2", "wa1", "wa2", "wa3",
                                 "wb1", "wb2", "wb3", "pk1", "pk2", "u_min", "u_max"};

double& field(PhParams& p, const std::string& key) {
    if (key == "tank_area") return p.tank_area;
    if (key == "valve_coeff") return p.valve_coeff;
    if (key == "valve_exponent") return p.valve_exponent;
    if (key == "outlet_offset") return p.outlet_offset;
    if (key == "q1") return p.q1;
    if (key == "q2") return p.q2;
    if (key == "wa1") return p.wa1;
    if (key == "wa2") return p.wa2;
    if (key == "wa3") return p.wa3;
    if (key == "wb1") return p.wb1;
    if (key == "wb2") return p.wb2;
    if (key == "wb3") return p.wb3;
    if (key == "pk1") return p.pk1;
    if (key == "pk2") return p.pk2;
    if (key == "u_min") return p.u_min;
    if (key == "u_max") return p.u_max;
    throw SchemaError("pH parameter file: unknown key " + key);
}

}  // namespace

PhParams load_ph_params(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(
            "pH plant parameter file not found: " + path.string() +
            ". The benchmark ships the model structure only; populate the "
            "parameters from the cited literature (Hall 1989) into a JSON file "
            "with keys tank_area, valve_coeff, valve_exponent, outlet_offset, "
            "q1, q2, wa1..wa3, wb1..wb3, pk1, pk2, u_min, u_max.");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("pH parameter file: " + std::string(e.what()));
    }
    PhParams p;
    for (const char* key : kKeys) {
        if (!j.contains(key) || !j[key].is_number()) {
            throw SchemaError(std::string("pH parameter file: missing numeric key ") + key);
        }
        field(p, key) = j[key].get<double>();
    }
    p.validate();
    return p;
}

void save_ph_params(const std::filesystem::path& path, const PhParams& params) {
    nlohmann::json j;
    PhParams copy = params;
    for (const char* key : kKeys) {
        j[key] = field(copy, key);
    }
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write pH parameter file: " + path.string());
    out << j.dump(2) << "\n";
}

PhPlant::PhPlant(PhParams params) : params_(std::move(params)) { params_.validate(); }

std::pair<double, double> PhPlant::input_range() const {
    return {params_.u_min, params_.u_max};
}

Eigen::VectorXd PhPlant::derivative(const Eigen::VectorXd& state, double u) const {
    if (state.size() != 3) throw InvalidArgument("PhPlant: state must be a 3-vector");
    const double wa4 = state[0];
    const double wb4 = state[1];
    const double h = state[2];

    const PhParams& c = params_;
    const double volume = c.tank_area * std::max(h, 1e-6);
    const double level = std::max(h + c.outlet_offset, 0.0);
    const double outflow = c.valve_coeff * std::pow(level, c.valve_exponent);

    Eigen::VectorXd dx(3);
    dx[0] = (c.q1 * (c.wa1 - wa4) + c.q2 * (c.wa2 - wa4) + u * (c.wa3 - wa4)) / volume;
    dx[1] = (c.q1 * (c.wb1 - wb4) + c.q2 * (c.wb2 - wb4) + u * (c.wb3 - wb4)) / volume;
    dx[2] = (c.q1 + c.q2 + u - outflow) / c.tank_area;
    return dx;
}

double PhPlant::output(const Eigen::VectorXd& state, double /*u*/) const {
    if (state.size() != 3) throw InvalidArgument("PhPlant: state must be a 3-vector");
    const double wa4 = state[0];
    const double wb4 = state[1];

    // charge balance, monotone increasing in pH on [0, 14]
    auto balance = [&](double ph) {
        const double hplus = std::pow(10.0, -ph);
        const double oh = std::pow(10.0, ph - 14.0);
        const double buffer = wb4 * (1.0 + 2.0 * std::pow(10.0, ph - params_.pk2)) /
                              (1.0 + std::pow(10.0, params_.pk1 - ph) +
                               std::pow(10.0, ph - params_.pk2));
        return wa4 + oh - hplus + buffer;
    };

    double lo = 0.0, hi = 14.0;
    double f_lo = balance(lo);
    double f_hi = balance(hi);
    if (f_lo > 0.0) return lo;  // outside the titratable range
    if (f_hi < 0.0) return hi;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = balance(mid);
        if (f_mid <= 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    return 0.5 * (lo + hi);
}

Eigen::VectorXd ph_plant_simulate(const PhParams& params, const Eigen::VectorXd& x0,
                                  const Eigen::VectorXd& u_seq, double sampling_time,
                                  int inner_steps) {
    if (u_seq.size() == 0) return Eigen::VectorXd();
    auto plant = std::make_shared<const PhPlant>(params);
    Rk4Plant discrete(plant, sampling_time, inner_steps);

    Eigen::VectorXd y(u_seq.size());
    Eigen::VectorXd x = x0;
    for (Eigen::Index k = 0; k < u_seq.size(); ++k) {
        auto [next, out] = discrete.step(x, u_seq[k]);
        if (!next.allFinite() || !std::isfinite(out)) {
            throw NumericDivergence("ph_plant_simulate: non-finite state", static_cast<std::size_t>(k));
        }
        x = std::move(next);
        y[k] = out;
    }
    return y;
}

}  // namespace nnarx
