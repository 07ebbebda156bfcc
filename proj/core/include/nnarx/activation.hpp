#pragma once

#include <string>

namespace nnarx {

/// Scalar activation applied elementwise by a network layer. Activations
/// must be zero-centered (f(0) = 0) and Lipschitz; the stability
/// certificate consumes the registered Lipschitz constant.
struct Activation {
    std::string name;
    double lipschitz = 1.0;
    double (*f)(double) = nullptr;
    double (*df)(double) = nullptr;

    double apply(double v) const { return f(v); }
    double slope(double v) const { return df(v); }
};

Activation tanh_activation();
Activation identity_activation();

/// Register a custom zero-centered activation under `name` with an explicit
/// Lipschitz constant. Throws InvalidArgument if f(0) != 0, the constant is
/// not positive, or the name collides with an existing entry.
void register_activation(const std::string& name, double (*f)(double),
                         double (*df)(double), double lipschitz);

/// Look up an activation by name ("tanh" and "identity" are built in).
/// Throws InvalidArgument for unknown names.
Activation activation_by_name(const std::string& name);

}  // namespace nnarx
