#include "hubtrack/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "hubtrack/errors.hpp"

namespace hubtrack {

Spectrum current_spectrum(const Trajectory& traj, double omega0, Window window) {
  const auto djdt = numerical_gradient(traj.current, traj.dt());
  return harmonic_spectrum(djdt, traj.dt(), omega0, window);
}

double max_abs_difference(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ParameterError("series lengths differ");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::vector<FilterSweepEntry> filter_sweep(const HubbardModel& model, const StateVector& psi0,
                                           const Trajectory& tracking,
                                           std::span<const double> cutoffs, double omega0,
                                           Window window, const PropagationOptions& opts) {
  if (tracking.size() < 3 || tracking.phi.size() != tracking.size()) {
    throw ParameterError("filter sweep needs a tracking trajectory with a field series");
  }
  const double dt = tracking.dt();
  const TimeGrid grid{dt, tracking.size() - 1};
  const Spectrum reference = current_spectrum(tracking, omega0, window);

  std::vector<FilterSweepEntry> out;
  out.reserve(cutoffs.size());
  for (double cutoff : cutoffs) {
    FilterSweepEntry e;
    e.cutoff = cutoff;
    try {
      SampledField field(0.0, dt, lowpass_filter(tracking.phi, dt, cutoff * omega0));
      const Trajectory run = propagate_driven(model, psi0, field, grid, opts);
      e.spectrum = current_spectrum(run, omega0, window);
      e.mismatch = spectral_mismatch(e.spectrum, reference, cutoff);
      e.max_norm_deviation = 0.0;
      for (double n : run.norm) e.max_norm_deviation = std::max(e.max_norm_deviation, std::abs(n - 1.0));
      e.ok = true;
    } catch (const std::exception& ex) {
      e.error = ex.what();
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace hubtrack
