#pragma once

#include <stdexcept>
#include <string>

namespace md2d {

/// @brief Caller broke an operation contract (wrong representation, bad argument).
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// @brief A multiplier hit a singular lattice point and no zero-mode policy allows it.
struct PolicyError : std::domain_error {
  using std::domain_error::domain_error;
};

/// @brief Input violates a mathematical precondition (nonzero mean, zero direction, ...).
struct ConstraintViolation : std::domain_error {
  using std::domain_error::domain_error;
};

/// @brief Numerical failure: NaN/inf, no admissible root, non-convergence.
struct NumericsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace md2d
