#include "nnarx/activation.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "nnarx/errors.hpp"

namespace nnarx {

namespace {

double tanh_f(double v) { return std::tanh(v); }
double tanh_df(double v) {
    const double t = std::tanh(v);
    return 1.0 - t * t;
}
double identity_f(double v) { return v; }
double identity_df(double) { return 1.0; }

struct Registry {
    std::map<std::string, Activation> entries;
    std::mutex mutex;

    Registry() {
        entries["tanh"] = Activation{"tanh", 1.0, &tanh_f, &tanh_df};
        entries["identity"] = Activation{"identity", 1.0, &identity_f, &identity_df};
    }
};

Registry& registry() {
    static Registry r;
    return r;
}

}  // namespace

Activation tanh_activation() { return activation_by_name("tanh"); }
Activation identity_activation() { return activation_by_name("identity"); }

void register_activation(const std::string& name, double (*f)(double),
                         double (*df)(double), double lipschitz) {
    if (f == nullptr || df == nullptr) {
        throw InvalidArgument("register_activation: null function");
    }
    if (!(lipschitz > 0.0)) {
        throw InvalidArgument("register_activation: Lipschitz constant must be positive");
    }
    if (f(0.0) != 0.0) {
        throw InvalidArgument("register_activation: activation must be zero-centered, f(0) != 0");
    }
    auto& reg = registry();
    std::lock_guard<std::mutex> lock(reg.mutex);
    if (reg.entries.count(name) != 0) {
        throw InvalidArgument("register_activation: name already registered: " + name);
    }
    reg.entries[name] = Activation{name, lipschitz, f, df};
}

Activation activation_by_name(const std::string& name) {
    auto& reg = registry();
    std::lock_guard<std::mutex> lock(reg.mutex);
    auto it = reg.entries.find(name);
    if (it == reg.entries.end()) {
        throw InvalidArgument("unknown activation: " + name);
    }
    return it->second;
}

}  // namespace nnarx
