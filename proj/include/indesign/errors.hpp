#pragma once

#include <stdexcept>
#include <string>

namespace indesign {

/// Base class for every error raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Vector or matrix sizes incompatible with the requested operation.
struct BadDimension : Error {
    using Error::Error;
};

/// A complex spectrum does not satisfy the k <-> N-k conjugate pairing.
struct SymmetryViolation : Error {
    using Error::Error;
};

/// A symmetric Toeplitz matrix fails the positive-semidefinite check.
struct NotPSD : Error {
    using Error::Error;
};

/// Kernel hyperparameters out of range, or a user kernel that is not SPD.
struct BadHyperparameter : Error {
    using Error::Error;
};

/// Phase assignment does not match the parity structure of the signal length.
struct BadPhaseCount : Error {
    using Error::Error;
};

/// A connector matrix does not have the required identity-plus-pair-blocks layout.
struct BadStructure : Error {
    using Error::Error;
};

/// Gram matrix too close to singular to produce a meaningful estimate.
struct IllConditioned : Error {
    using Error::Error;
};

/// Requested enumeration would exceed the configured cap.
struct EnumerationTooLarge : Error {
    using Error::Error;
};

/// No nonnegative symmetric spectrum can reproduce the given autocovariance.
struct Infeasible : Error {
    double residual;
    Infeasible(const std::string& what, double resid) : Error(what), residual(resid) {}
};

/// A solution that should be nonnegative has entries below the tolerance band.
struct DegenerateNegative : Error {
    using Error::Error;
};

}  // namespace indesign
