#pragma once

#include <stdexcept>
#include <string>

namespace loattack {

// Input violates a documented precondition (e.g. a non-symmetric covariance).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Symplectic spectrum below the uncertainty bound.
class PhysicalityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Formula evaluated at a pole (T = 1 for the zero-excess-noise tuning,
// T in {0, 1} for the entangling cloner).
class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Parameter estimation cannot proceed on the supplied data.
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid run configuration (CLI flags, config files, sweep ranges).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Output could not be written or input could not be read.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace loattack
