#pragma once

#include <vector>

namespace hubtrack {

/// Natural cubic spline through uniformly spaced samples; C2 inside the sample range.
class UniformCubicSpline {
 public:
  UniformCubicSpline() = default;
  UniformCubicSpline(double t_start, double dt, std::vector<double> values);

  double t_start() const noexcept { return t_start_; }
  double dt() const noexcept { return dt_; }
  double t_end() const noexcept { return t_start_ + dt_ * static_cast<double>(values_.size() - 1); }
  const std::vector<double>& values() const noexcept { return values_; }

  /// Throws ParameterError outside [t_start, t_end] (beyond a relative 1e-9 slack).
  double value(double t) const;
  double derivative(double t) const;

 private:
  void locate(double t, std::size_t& i, double& u) const;

  double t_start_ = 0.0;
  double dt_ = 1.0;
  std::vector<double> values_;
  std::vector<double> second_;  // second derivatives at the knots
};

}  // namespace hubtrack
