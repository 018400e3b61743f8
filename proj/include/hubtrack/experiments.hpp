#pragma once

#include <span>
#include <string>
#include <vector>

#include "hubtrack/dynamics.hpp"
#include "hubtrack/spectral.hpp"

namespace hubtrack {

/// Spectrum of the dipole acceleration, the numerical gradient of the stored current.
Spectrum current_spectrum(const Trajectory& traj, double omega0, Window window = Window::Blackman);

struct FilterSweepEntry {
  /// Cut-off in units of omega0.
  double cutoff;
  bool ok = false;
  std::string error;
  Spectrum spectrum;
  /// Relative L1 power mismatch against the tracking spectrum over orders <= cutoff.
  double mismatch = NAN;
  double max_norm_deviation = NAN;
};

/**
 * For each cut-off: low-pass the tracked field, drive the system with the
 * filtered field from psi0 and compare the spectrum of the resulting current
 * with that of the tracking run. A failed entry is recorded and the sweep moves on.
 */
std::vector<FilterSweepEntry> filter_sweep(const HubbardModel& model, const StateVector& psi0,
                                           const Trajectory& tracking,
                                           std::span<const double> cutoffs, double omega0,
                                           Window window = Window::Blackman,
                                           const PropagationOptions& opts = {});

/// max_i |a_i - b_i| over equally long series.
double max_abs_difference(std::span<const double> a, std::span<const double> b);

}  // namespace hubtrack
