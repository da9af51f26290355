#pragma once

#include <stdexcept>
#include <string>

namespace crn {

/// Numerical failure: blow-up, overflow, or a violated numeric postcondition.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The truncated state space would exceed its configured hard limit.
class StateSpaceLimitError : public NumericError {
public:
    using NumericError::NumericError;
};

/// A caller broke a documented precondition (length mismatch, non-mixed state, ...).
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace crn
