#pragma once
#include <stdexcept>
#include <string>

namespace mpsaw {

// Invalid user-facing configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Computation cannot proceed: degenerate mesh, singular local system,
// unconstrained (rigid) global system, solver breakdown (CLI exit code 3).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File and parse problems (CLI exit code 4).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mpsaw
