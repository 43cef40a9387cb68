#pragma once

#include <stdexcept>
#include <string>

namespace sparseloc {

/// Pinning event has zero probability under the base measure.
struct InfeasiblePin : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// mu(x) > 0 at a state where nu(x) = 0.
struct AbsoluteContinuityViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A coordinate variance fell below the requested floor sigma^2.
struct VarianceFloorViolated : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Exact enumeration would exceed the configured budget; use sampling mode.
struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// No independent set of the requested size exists.
struct EmptySlice : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace sparseloc
