#include "hubtrack/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hubtrack/errors.hpp"

namespace hubtrack {

UniformCubicSpline::UniformCubicSpline(double t_start, double dt, std::vector<double> values)
    : t_start_(t_start), dt_(dt), values_(std::move(values)) {
  if (!(dt_ > 0.0)) throw ParameterError("spline spacing must be positive");
  if (values_.size() < 2) throw ParameterError("spline needs at least two samples");

  const std::size_t n = values_.size();
  second_.assign(n, 0.0);
  if (n < 3) return;

  // Thomas algorithm for M_{i-1} + 4 M_i + M_{i+1} = 6 (y_{i+1} - 2 y_i + y_{i-1}) / h^2
  const std::size_t m = n - 2;
  std::vector<double> c(m), d(m);
  const double h2 = dt_ * dt_;
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = k + 1;
    const double rhs = 6.0 * (values_[i + 1] - 2.0 * values_[i] + values_[i - 1]) / h2;
    if (k == 0) {
      c[k] = 1.0 / 4.0;
      d[k] = rhs / 4.0;
    } else {
      const double denom = 4.0 - c[k - 1];
      c[k] = 1.0 / denom;
      d[k] = (rhs - d[k - 1]) / denom;
    }
  }
  second_[m] = d[m - 1];
  for (std::size_t k = m - 1; k-- > 0;) second_[k + 1] = d[k] - c[k] * second_[k + 2];
}

void UniformCubicSpline::locate(double t, std::size_t& i, double& u) const {
  const double span = t_end() - t_start_;
  const double slack = 1e-9 * std::max(span, dt_);
  if (t < t_start_ - slack || t > t_end() + slack) {
    std::ostringstream msg;
    msg << "time " << t << " outside sampled range [" << t_start_ << ", " << t_end() << "]";
    throw ParameterError(msg.str());
  }
  const double x = (t - t_start_) / dt_;
  const double last = static_cast<double>(values_.size() - 2);
  const double cell = std::clamp(std::floor(x), 0.0, last);
  i = static_cast<std::size_t>(cell);
  u = x - cell;
}

double UniformCubicSpline::value(double t) const {
  std::size_t i;
  double u;
  locate(t, i, u);
  const double a = 1.0 - u;
  const double h2 = dt_ * dt_;
  return a * values_[i] + u * values_[i + 1] +
         ((a * a * a - a) * second_[i] + (u * u * u - u) * second_[i + 1]) * h2 / 6.0;
}

double UniformCubicSpline::derivative(double t) const {
  std::size_t i;
  double u;
  locate(t, i, u);
  const double a = 1.0 - u;
  return (values_[i + 1] - values_[i]) / dt_ +
         (-(3.0 * a * a - 1.0) * second_[i] + (3.0 * u * u - 1.0) * second_[i + 1]) * dt_ / 6.0;
}

}  // namespace hubtrack
