#pragma once

#include <stdexcept>
#include <string>

namespace hubtrack {

/// Invalid physical or numerical parameters (bad particle counts, negative hopping, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Iterative eigensolver failed to reach the requested residual.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Time integration left its accuracy envelope (norm drift, non-finite state).
class IntegratorError : public std::runtime_error {
 public:
  IntegratorError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// A derived quantity disagrees with its analytic counterpart beyond tolerance.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The tracking problem left the controllable region: |X| >= 1 - eps1 or R <= eps2.
class ConstraintViolation : public std::runtime_error {
 public:
  enum class Kind { TrackingArgument, BondMagnitude, Uncontrollable };

  ConstraintViolation(Kind kind, double value, double time, const std::string& what)
      : std::runtime_error(what), kind_(kind), value_(value), time_(time) {}

  Kind kind() const noexcept { return kind_; }
  /// The offending X or R value.
  double value() const noexcept { return value_; }
  /// Simulation time at which the violation was detected (NaN when not time-stamped).
  double time() const noexcept { return time_; }

 private:
  Kind kind_;
  double value_;
  double time_;
};

/// Reading or writing an input/output file failed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hubtrack
