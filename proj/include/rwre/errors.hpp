#pragma once

#include <stdexcept>
#include <string>

namespace rwre {

struct SimError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Walk did not reach the target site within the step budget.
struct StepBudgetExceeded : SimError {
  using SimError::SimError;
};

// Walk stepped below the lowest sampled environment site.
struct RangeExceeded : SimError {
  using SimError::SimError;
};

// A branching generation exceeded the population safety cap.
struct PopulationExplosion : SimError {
  using SimError::SimError;
};

// The rho-product series failed to shrink below tolerance.
struct SeriesDivergence : SimError {
  using SimError::SimError;
};

// No observation with the requested site history.
struct EmptyHistory : SimError {
  using SimError::SimError;
};

// Criterion evaluated to -inf on the entire search grid.
struct NonFiniteCriterion : SimError {
  using SimError::SimError;
};

// Operation requires a ballistic (or transient) family and got something else.
struct RegimeError : SimError {
  using SimError::SimError;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rwre
