#pragma once

#include <stdexcept>
#include <string>

namespace rsmanet {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument or parameter set outside the model's domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A series or quadrature ran out of budget. Carries the best value reached.
class NoConvergence : public Error {
public:
    NoConvergence(const std::string& what, double best_value, double error_estimate = 0.0)
        : Error(what), best_value_(best_value), error_estimate_(error_estimate) {}

    double best_value() const noexcept { return best_value_; }
    double error_estimate() const noexcept { return error_estimate_; }

private:
    double best_value_;
    double error_estimate_;
};

/// Gram matrix of a channel too ill-conditioned for zero-forcing.
class SingularChannel : public Error {
public:
    using Error::Error;
};

/// Simulation window cuts off too much of the expected interference.
class InsufficientWindow : public Error {
public:
    InsufficientWindow(const std::string& what, double truncated_fraction)
        : Error(what), truncated_fraction_(truncated_fraction) {}

    double truncated_fraction() const noexcept { return truncated_fraction_; }

private:
    double truncated_fraction_;
};

/// Root-finding bracket without a sign change.
class BracketError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace rsmanet
