#pragma once

#include <stdexcept>
#include <string>

namespace dopa {

// Error taxonomy. Every failure mode raises one of these so callers (and the
// CLI exit-code mapping) can tell bad configuration apart from bad inputs.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Generator evaluated outside its effective domain.
struct DomainError : Error {
  using Error::Error;
};

// Scalar argument outside its admissible range, e.g. quantile at t not in (0,1).
struct RangeError : Error {
  using Error::Error;
};

// Invalid construction parameters or unparseable spec strings.
struct ConfigError : Error {
  using Error::Error;
};

// Bad runtime inputs: non-finite reward estimates, off-simplex vectors.
struct InputError : Error {
  using Error::Error;
};

// An iterative solver exhausted its budget.
struct ConvergenceError : Error {
  using Error::Error;
};

// Environment emitted a reward outside [-1, 0]^K.
struct EnvError : Error {
  using Error::Error;
};

// Arm index out of range.
struct IndexError : Error {
  using Error::Error;
};

// Noise model cannot be built (some arm probability hit 0 or 1).
struct ModelError : Error {
  using Error::Error;
};

}  // namespace dopa
