#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hubtrack/dynamics.hpp"
#include "hubtrack/fock_lattice.hpp"
#include "hubtrack/groundstate.hpp"
#include "hubtrack/spectral.hpp"

namespace hubtrack {

enum class TargetSource { Reference, File, Trajectory };

struct TargetConfig {
  TargetSource source = TargetSource::Reference;
  /// Interaction of the in-process reference run (source = reference).
  double U = 0.0;
  /// Delimited file with t and J columns, or a prior trajectory file.
  std::string path;
};

struct TrackingConfig {
  TargetConfig target;
  /// Fixed k; ignored when auto_scale is set.
  double scale = 1.0;
  bool auto_scale = false;
  double safety = 0.95;
  double shrink = 0.8;
  int max_attempts = 25;
  ConstraintConfig constraints;
};

struct GridConfig {
  /// Tracking runs at U != 0 need this many steps to keep norm drift below 10 * tol.
  int steps_per_cycle = 16000;
  /// Overrides steps_per_cycle when set.
  std::optional<double> dt;
  /// Defaults to the pulse duration.
  std::optional<double> duration;
  double tol = 1e-9;
  double tracking_tol = 1e-8;
};

struct ObservableConfig {
  std::string name = "doublon";
};

struct OutputConfig {
  std::size_t snapshot_stride = 0;
  Window window = Window::Blackman;
  bool write_state = false;
};

struct FilterConfig {
  /// Cut-offs in units of omega0.
  std::vector<double> cutoffs{5.0, 10.0, 20.0, 30.0, 50.0};
  /// Appends a cut-off at the Nyquist frequency of the grid.
  bool include_nyquist = true;
  /// Reuse Phi_T from this tracking trajectory instead of running the tracking step.
  std::string trajectory;
};

struct ExperimentConfig {
  SystemParams system;
  PulseSpec drive{2.94, 0.2617, 10, PulseForm::Sin2Envelope};
  TrackingConfig tracking;
  GridConfig grid;
  ObservableConfig observable;
  OutputConfig output;
  GroundStateOptions solver;
  FilterConfig filter;

  /// Throws ParameterError on the first invalid entry.
  void validate() const;
  TimeGrid time_grid() const;
};

/// Missing keys take defaults; unknown keys and wrong types raise ParameterError.
ExperimentConfig parse_config(const nlohmann::ordered_json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Fully defaulted echo of a configuration.
nlohmann::ordered_json to_json(const ExperimentConfig& cfg);

std::string to_string(TargetSource s);

}  // namespace hubtrack
