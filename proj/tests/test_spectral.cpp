#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "hubtrack/errors.hpp"
#include "hubtrack/spectral.hpp"

using namespace hubtrack;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> sample(std::size_t n, double dt, auto f) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = f(dt * static_cast<double>(i));
  return out;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::size_t peak(const Spectrum& s) {
  return static_cast<std::size_t>(std::max_element(s.power.begin(), s.power.end()) - s.power.begin());
}

}  // namespace

TEST_CASE("numerical gradient") {
  const auto ramp = sample(50, 0.1, [](double t) { return 3.0 * t - 1.0; });
  for (double g : numerical_gradient(ramp, 0.1)) CHECK(g == doctest::Approx(3.0).epsilon(1e-12));

  for (double g : numerical_gradient(std::vector<double>(10, 4.2), 0.3)) CHECK(g == 0.0);

  CHECK_THROWS_AS(numerical_gradient(std::vector<double>{1.0, 2.0}, 0.1), ParameterError);

  // sin -> cos with second-order error at both the interior and the ends
  double prev = 0.0;
  for (double dt : {0.02, 0.01, 0.005}) {
    const auto n = static_cast<std::size_t>(std::lround(4.0 / dt)) + 1;
    const auto g = numerical_gradient(sample(n, dt, [](double t) { return std::sin(t); }), dt);
    const double err = max_diff(g, sample(n, dt, [](double t) { return std::cos(t); }));
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.05));
    prev = err;
  }
}

TEST_CASE("pure tone peaks at order 1") {
  const double w0 = 0.7;
  const std::size_t n = 4096;
  const double dt = 10 * 2 * kPi / w0 / n;
  const auto s = harmonic_spectrum(sample(n, dt, [&](double t) { return std::sin(w0 * t); }), dt, w0);
  CHECK(s.order[peak(s)] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.power.size() == n / 2 + 1);
  CHECK(s.order[1] == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("two-tone power ratio") {
  const double w0 = 1.3;
  const std::size_t n = 2000;
  const double dt = 8 * 2 * kPi / w0 / n;  // eight whole periods
  const auto x = sample(n, dt, [&](double t) { return 2.0 * std::sin(w0 * t) + 0.5 * std::sin(3 * w0 * t); });
  const auto s = harmonic_spectrum(x, dt, w0, Window::Rectangular);
  // bins 8 and 24 hold the two tones; (N A / 2)^2 per one-sided bin pair
  CHECK(s.order[8] == doctest::Approx(1.0));
  CHECK(s.order[24] == doctest::Approx(3.0));
  CHECK(s.power[8] / s.power[24] == doctest::Approx(16.0).epsilon(1e-10));
  double leak = 0.0;
  for (std::size_t k = 0; k < s.power.size(); ++k) {
    if (k != 8 && k != 24) leak = std::max(leak, s.power[k]);
  }
  CHECK(leak < 1e-20 * s.power[8]);
}

TEST_CASE("spectrum obeys Parseval for both windows") {
  const std::size_t n = 1001;
  const double dt = 0.05;
  const auto x = sample(n, dt, [](double t) { return std::sin(0.9 * t) * std::exp(-0.01 * t) + 0.3 * std::cos(5.1 * t) + 0.2; });
  for (Window w : {Window::Rectangular, Window::Blackman}) {
    const auto s = harmonic_spectrum(x, dt, 0.9, w);
    double energy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double win = 1.0;
      if (w == Window::Blackman) {
        const double r = 2 * kPi * static_cast<double>(i) / static_cast<double>(n - 1);
        win = 0.42 - 0.5 * std::cos(r) + 0.08 * std::cos(2 * r);
      }
      energy += win * win * x[i] * x[i];
    }
    double total = 0.0;
    for (double p : s.power) {
      CHECK(p >= 0.0);
      total += p;
    }
    CHECK(total == doctest::Approx(energy).epsilon(1e-12));
  }
}

TEST_CASE("low-pass filter examples") {
  const double w0 = 0.5;
  const std::size_t n = 1200;
  const double dt = 6 * 2 * kPi / w0 / n;
  const auto x = sample(n, dt, [&](double t) { return std::sin(w0 * t) + std::sin(2 * w0 * t) + 0.25; });

  CHECK(lowpass_filter(x, dt, nyquist(dt)) == x);
  CHECK(lowpass_filter(x, dt, 10 * nyquist(dt)) == x);

  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  for (double v : lowpass_filter(x, dt, 0.0)) CHECK(v == doctest::Approx(mean).epsilon(1e-12));

  const auto low = lowpass_filter(x, dt, 1.5 * w0);
  CHECK(max_diff(low, sample(n, dt, [&](double t) { return std::sin(w0 * t) + 0.25; })) < 1e-12);
}

TEST_CASE("low-pass filter is an idempotent projection") {
  const std::size_t n = 777;
  const double dt = 0.03;
  const auto x = sample(n, dt, [](double t) { return std::tanh(std::sin(1.7 * t) * 3.0) + 0.1 * t; });
  for (double wc : {0.5, 2.0, 11.0, 40.0}) {
    const auto once = lowpass_filter(x, dt, wc);
    const auto twice = lowpass_filter(once, dt, wc);
    CHECK(max_diff(once, twice) < 1e-12);
    const auto s = harmonic_spectrum(once, dt, 1.0, Window::Rectangular);
    double above = 0.0, total = 0.0;
    for (std::size_t k = 0; k < s.power.size(); ++k) {
      total += s.power[k];
      if (s.order[k] > wc) above += s.power[k];
    }
    CHECK(above < 1e-24 * total);
  }
  CHECK_THROWS_AS(lowpass_filter(x, dt, -1.0), ParameterError);
}

TEST_CASE("spectral mismatch") {
  const std::size_t n = 512;
  const double dt = 0.1;
  const auto x = sample(n, dt, [](double t) { return std::sin(t) + 0.1 * std::sin(7 * t); });
  const auto a = harmonic_spectrum(x, dt, 1.0);
  CHECK(spectral_mismatch(a, a, 5.0) == 0.0);
  auto b = a;
  for (auto& p : b.power) p *= 1.5;
  CHECK(spectral_mismatch(b, a, 100.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(parse_window("blackman") == Window::Blackman);
  CHECK(parse_window("rectangular") == Window::Rectangular);
  CHECK_THROWS_AS(parse_window("hann"), ParameterError);
}
