#pragma once

#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace hubtrack {

enum class Window { Rectangular, Blackman };

Window parse_window(const std::string& name);
std::string to_string(Window w);

/**
 * One-sided power spectrum of a real series.
 *
 * power[k] is scaled so that sum(power) equals the energy sum |w_n x_n|^2 of
 * the windowed signal; `order` is the bin frequency in units of omega0.
 */
struct Spectrum {
  std::vector<double> order;
  std::vector<double> power;
  double omega0 = 1.0;
  Window window = Window::Blackman;
};

/// Centred differences inside, second-order one-sided differences at both ends.
std::vector<double> numerical_gradient(std::span<const double> series, double dt);

/// |DFT(window * x)|^2 on the non-negative frequency axis.
Spectrum harmonic_spectrum(std::span<const double> signal, double dt, double omega0,
                           Window window = Window::Blackman);

/**
 * Brick-wall low-pass: zero every Fourier bin with |omega| > omega_c.
 * Returns the input unchanged when no bin lies above the cut-off.
 */
std::vector<double> lowpass_filter(std::span<const double> series, double dt, double omega_c);

/// Angular frequency of the highest resolvable bin, pi / dt.
inline double nyquist(double dt) { return std::numbers::pi / dt; }

/**
 * Relative L1 distance between two spectra over bins with order <= max_order:
 * sum |P - P_ref| / sum P_ref.
 */
double spectral_mismatch(const Spectrum& spectrum, const Spectrum& reference, double max_order);

}  // namespace hubtrack
