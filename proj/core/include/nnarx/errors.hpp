#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nnarx {

/// Base class of all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller-supplied argument violates a precondition (dimension mismatch,
/// nonpositive size, out-of-range value, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A model failed structural validation (non-finite weights, broken
/// dimension chain).
class InvalidModel : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// A simulation produced a non-finite value. `step_index` is the step at
/// which the blow-up was detected.
class NumericDivergence : public Error {
public:
    NumericDivergence(const std::string& what, std::size_t step_index)
        : Error(what), step_index(step_index) {}
    std::size_t step_index;
};

/// An iterative scheme hit its iteration cap. `best_estimate` is the last
/// iterate's value.
class ConvergenceFailure : public Error {
public:
    ConvergenceFailure(const std::string& what, double best_estimate)
        : Error(what), best_estimate(best_estimate) {}
    double best_estimate;
};

/// Invalid or inconsistent configuration (missing files, bad counts, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A serialized artifact does not match its schema.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// A data channel cannot be normalized (zero variance).
class NormalizationError : public Error {
public:
    using Error::Error;
};

/// A metric's denominator is identically zero (e.g. constant reference
/// signal in the fit index).
class UndefinedDenominator : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// An internal consistency check failed; indicates a library bug, not bad
/// input.
class InternalError : public Error {
public:
    using Error::Error;
};

/// Training aborted after repeated numeric divergence.
class TrainingFailure : public Error {
public:
    using Error::Error;
};

}  // namespace nnarx
