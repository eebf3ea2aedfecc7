#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vfsk {

/// Base class of every exception thrown by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The operation does not support the supplied field or configuration,
/// e.g. a piecewise-constant friction handed to a time stepper.
class Unsupported : public Error {
public:
    using Error::Error;
};

/// A trajectory left the finite region |q| <= 1e8 or became non-finite.
class BlowUp : public Error {
public:
    BlowUp(const std::string& what, std::size_t step)
        : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// A linear solve did not reach its residual contract.
class SolveFailure : public Error {
public:
    SolveFailure(const std::string& what, double residual)
        : Error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

}  // namespace vfsk
