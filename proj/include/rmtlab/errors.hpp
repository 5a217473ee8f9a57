#pragma once

#include <stdexcept>
#include <string>

namespace rmtlab {

// Invalid parameters, spike specs, or config contents.
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Resolvent evaluated at a point inside (or numerically touching) the
// spectrum of its argument.
struct PoleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A numerical consistency check failed (e.g. a covariance that must be
// positive semidefinite is not, beyond tolerance).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rmtlab
