#pragma once

#include <stdexcept>
#include <string>

namespace rocpost {

// Base for everything thrown on purpose. CLI maps subclasses to exit codes.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad user input: malformed CSV/config, impossible options, degenerate data.
struct InputError : Error {
  using Error::Error;
};

// A group with no positives or no negatives cannot define rates.
struct DegenerateGroupError : InputError {
  using InputError::InputError;
};

// Linear-fractional denominator below its floor at an evaluation point.
struct DenominatorError : Error {
  using Error::Error;
};

// Base operating point on the anti-diagonal; mechanism params undefined.
struct DegenerateBaseError : Error {
  using Error::Error;
};

// No mechanism parameters in [0,1] reach the requested rates.
struct ConstructionInfeasibleError : Error {
  using Error::Error;
};

// Violated internal contract (dimension mismatch, solver logic fault).
struct InternalError : Error {
  using Error::Error;
};

}  // namespace rocpost
