#pragma once

#include <stdexcept>
#include <string>

namespace d2d {

// Parameter outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Content index, helper order or similar index out of range.
class IndexError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// Distance triple outside the geometric regime an operation is defined on.
class GeometryError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Conditional metric requested for an event of probability zero.
class UndefinedConditional : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class InsufficientSamples : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Base for failures of the numerical engines (series, quadrature).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonConvergenceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ToleranceNotMet : public NumericalError {
public:
    ToleranceNotMet(const std::string& what, double estimate, double achieved_error)
        : NumericalError(what), estimate_(estimate), achieved_error_(achieved_error) {}

    double estimate() const noexcept { return estimate_; }
    double achieved_error() const noexcept { return achieved_error_; }

private:
    double estimate_;
    double achieved_error_;
};

}  // namespace d2d
