#pragma once

#include <stdexcept>
#include <string>

namespace mfrmab {

/// A kernel row is not stochastic or an entry lies outside [0, 1].
class InvalidKernelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Steady-state denominator vanished: the chain has no unique stationary law.
class DegenerateKernelError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidBudgetError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class LengthMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// eta or omega reached 1, i.e. the episode is not past t0.
class AssumptionViolatedError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The visitation bound has psi <= 0 and says nothing.
class VacuousBoundError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Some pi*_i exceeds 1/K, so the K-scaled regret is undefined.
class InfeasibleScalingError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A runtime invariant of the simulation failed. `what()` names it.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace mfrmab
