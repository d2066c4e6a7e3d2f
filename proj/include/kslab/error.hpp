/**
 * @file error.hpp
 * @brief Exception types shared by every kslab module.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace kslab {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A coefficient envelope or hypothesis inequality is violated.
class HypothesisViolation : public Error {
public:
    using Error::Error;
};

/// u dipped below -1e-8 during a step.
class PositivityLoss : public Error {
public:
    PositivityLoss(const std::string& what, double time, double min_value)
        : Error(what), time_(time), min_value_(min_value) {}
    double time() const { return time_; }
    double min_value() const { return min_value_; }

private:
    double time_;
    double min_value_;
};

/// ||u||_inf exceeded the blow-up ceiling although (H1) holds.
class BlowupDetected : public Error {
public:
    BlowupDetected(const std::string& what, double time, double max_value)
        : Error(what), time_(time), max_value_(max_value) {}
    double time() const { return time_; }
    double max_value() const { return max_value_; }

private:
    double time_;
    double max_value_;
};

/// An iterative solve ran out of budget.
class ConvergenceFailure : public Error {
public:
    ConvergenceFailure(const std::string& what, double last_residual)
        : Error(what), last_residual_(last_residual) {}
    double last_residual() const { return last_residual_; }

private:
    double last_residual_;
};

/// A front came within 10 cells of the box boundary.
class BoxTooSmall : public Error {
public:
    using Error::Error;
};

/// No level crossing found (threshold above the solution).
class NoFront : public Error {
public:
    using Error::Error;
};

/// Malformed file or config.
class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace kslab
