#include "hubtrack/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <numbers>

#include "hubtrack/errors.hpp"

namespace hubtrack {

namespace {

// RAII wrappers around FFTW's aligned buffers and plans. FFTW_ESTIMATE plans
// are deterministic, so repeated transforms are bit-identical.
struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};
template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwDeleter>;

struct PlanDeleter {
  void operator()(fftw_plan p) const { fftw_destroy_plan(p); }
};
using Plan = std::unique_ptr<std::remove_pointer_t<fftw_plan>, PlanDeleter>;

template <typename T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
  return FftwBuffer<T>(static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(n, 1))));
}

std::vector<std::complex<double>> forward_real(std::span<const double> x) {
  const std::size_t n = x.size();
  const std::size_t nc = n / 2 + 1;
  auto in = fftw_buffer<double>(n);
  auto out = fftw_buffer<fftw_complex>(nc);
  Plan plan(fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
  std::copy(x.begin(), x.end(), in.get());
  fftw_execute(plan.get());
  std::vector<std::complex<double>> res(nc);
  for (std::size_t k = 0; k < nc; ++k) res[k] = {out[k][0], out[k][1]};
  return res;
}

std::vector<double> inverse_real(const std::vector<std::complex<double>>& X, std::size_t n) {
  const std::size_t nc = n / 2 + 1;
  auto in = fftw_buffer<fftw_complex>(nc);
  auto out = fftw_buffer<double>(n);
  Plan plan(fftw_plan_dft_c2r_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
  for (std::size_t k = 0; k < nc; ++k) {
    in[k][0] = X[k].real();
    in[k][1] = X[k].imag();
  }
  fftw_execute(plan.get());
  std::vector<double> res(out.get(), out.get() + n);
  for (auto& v : res) v /= static_cast<double>(n);
  return res;
}

std::vector<double> window_weights(Window w, std::size_t n) {
  std::vector<double> out(n, 1.0);
  if (w == Window::Blackman && n > 1) {
    const double denom = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = 2.0 * std::numbers::pi * static_cast<double>(i) / denom;
      out[i] = 0.42 - 0.5 * std::cos(x) + 0.08 * std::cos(2.0 * x);
    }
  }
  return out;
}

}  // namespace

Window parse_window(const std::string& name) {
  if (name == "blackman") return Window::Blackman;
  if (name == "none" || name == "rectangular") return Window::Rectangular;
  throw ParameterError("unknown spectrum window '" + name + "'");
}

std::string to_string(Window w) { return w == Window::Blackman ? "blackman" : "none"; }

std::vector<double> numerical_gradient(std::span<const double> f, double dt) {
  const std::size_t n = f.size();
  if (n < 3) throw ParameterError("numerical_gradient needs at least 3 samples");
  if (!(dt > 0.0)) throw ParameterError("numerical_gradient needs dt > 0");
  std::vector<double> g(n);
  for (std::size_t i = 1; i + 1 < n; ++i) g[i] = (f[i + 1] - f[i - 1]) / (2.0 * dt);
  // second-order one-sided stencils written in differences so constants give exactly zero
  g[0] = (4.0 * (f[1] - f[0]) - (f[2] - f[0])) / (2.0 * dt);
  g[n - 1] = (4.0 * (f[n - 1] - f[n - 2]) - (f[n - 1] - f[n - 3])) / (2.0 * dt);
  return g;
}

Spectrum harmonic_spectrum(std::span<const double> signal, double dt, double omega0,
                           Window window) {
  const std::size_t n = signal.size();
  if (n < 2) throw ParameterError("spectrum needs at least 2 samples");
  if (!(dt > 0.0) || !(omega0 > 0.0)) throw ParameterError("spectrum needs dt, omega0 > 0");

  const auto w = window_weights(window, n);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = w[i] * signal[i];
  const auto X = forward_real(x);

  Spectrum s;
  s.omega0 = omega0;
  s.window = window;
  s.order.resize(X.size());
  s.power.resize(X.size());
  const double dw = 2.0 * std::numbers::pi / (static_cast<double>(n) * dt);
  for (std::size_t k = 0; k < X.size(); ++k) {
    // interior bins stand for +-omega; DC and (even-n) Nyquist appear once
    const bool single = (k == 0) || (n % 2 == 0 && k == n / 2);
    s.order[k] = static_cast<double>(k) * dw / omega0;
    s.power[k] = (single ? 1.0 : 2.0) * std::norm(X[k]) / static_cast<double>(n);
  }
  return s;
}

std::vector<double> lowpass_filter(std::span<const double> series, double dt, double omega_c) {
  const std::size_t n = series.size();
  if (!(dt > 0.0)) throw ParameterError("lowpass_filter needs dt > 0");
  if (!(omega_c >= 0.0)) throw ParameterError("lowpass_filter needs omega_c >= 0");
  std::vector<double> out(series.begin(), series.end());
  if (n < 2) return out;

  const double dw = 2.0 * std::numbers::pi / (static_cast<double>(n) * dt);
  const std::size_t nc = n / 2 + 1;
  // a cut-off sitting on a bin keeps that bin despite rounding in k * dw
  const double limit = omega_c * (1.0 + 1e-12);
  std::size_t first_cut = nc;
  for (std::size_t k = 0; k < nc; ++k) {
    if (static_cast<double>(k) * dw > limit) {
      first_cut = k;
      break;
    }
  }
  if (first_cut == nc) return out;

  auto X = forward_real(series);
  for (std::size_t k = first_cut; k < nc; ++k) X[k] = 0.0;
  return inverse_real(X, n);
}

double spectral_mismatch(const Spectrum& spectrum, const Spectrum& reference, double max_order) {
  if (spectrum.power.size() != reference.power.size()) {
    throw ParameterError("spectra have different lengths");
  }
  double diff = 0.0;
  double ref = 0.0;
  for (std::size_t k = 0; k < spectrum.power.size(); ++k) {
    if (reference.order[k] > max_order * (1.0 + 1e-12)) break;
    diff += std::abs(spectrum.power[k] - reference.power[k]);
    ref += reference.power[k];
  }
  if (ref == 0.0) throw ParameterError("reference spectrum has no power below the cut-off");
  return diff / ref;
}

}  // namespace hubtrack
