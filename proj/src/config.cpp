#include "hubtrack/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "hubtrack/errors.hpp"

namespace hubtrack {

namespace {

using json = nlohmann::ordered_json;

// Reads typed keys out of one JSON object and rejects anything it did not read.
class Block {
 public:
  Block(const json& root, std::string name) : name_(std::move(name)) {
    if (root.contains(name_)) {
      node_ = &root.at(name_);
      if (!node_->is_object()) fail("", "must be an object");
    }
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    seen_.insert(key);
    if (!node_ || !node_->contains(key)) return;
    const json& v = node_->at(key);
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) fail(key, "must be a number");
      } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!v.is_number_integer()) fail(key, "must be an integer");
        if constexpr (std::is_unsigned_v<T>) {
          if (v.get<long long>() < 0) fail(key, "must be non-negative");
        }
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) fail(key, "must be a boolean");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) fail(key, "must be a string");
      }
      out = v.get<T>();
    } catch (const nlohmann::json::exception& e) {
      fail(key, e.what());
    }
  }

  template <typename T>
  void read_optional(const std::string& key, std::optional<T>& out) {
    seen_.insert(key);
    if (!node_ || !node_->contains(key) || node_->at(key).is_null()) return;
    T value{};
    read(key, value);
    out = value;
  }

  const json* child(const std::string& key) {
    seen_.insert(key);
    if (!node_ || !node_->contains(key)) return nullptr;
    return &node_->at(key);
  }

  void finish() const {
    if (!node_) return;
    for (const auto& [key, _] : node_->items()) {
      if (!seen_.count(key)) fail(key, "is not a recognised key");
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& why) const {
    throw ParameterError("config: " + name_ + (key.empty() ? "" : "." + key) + " " + why);
  }

 private:
  std::string name_;
  const json* node_ = nullptr;
  std::set<std::string> seen_;
};

TargetSource parse_source(const std::string& s) {
  if (s == "reference") return TargetSource::Reference;
  if (s == "file") return TargetSource::File;
  if (s == "trajectory") return TargetSource::Trajectory;
  throw ParameterError("config: tracking.target.source must be reference, file or trajectory");
}

PulseForm parse_form(const std::string& s) {
  if (s == "sin2") return PulseForm::Sin2Envelope;
  throw ParameterError("config: drive.form must be sin2");
}

}  // namespace

std::string to_string(TargetSource s) {
  switch (s) {
    case TargetSource::Reference: return "reference";
    case TargetSource::File: return "file";
    case TargetSource::Trajectory: return "trajectory";
  }
  return "reference";
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ParameterError("config: top level must be an object");
  static const std::set<std::string> blocks{"system", "drive",  "tracking", "grid",
                                            "observable", "output", "solver", "filter"};
  for (const auto& [key, _] : j.items()) {
    if (!blocks.count(key)) throw ParameterError("config: unknown block '" + key + "'");
  }

  ExperimentConfig c;
  {
    Block b(j, "system");
    b.read("L", c.system.L);
    b.read("n_up", c.system.n_up);
    b.read("n_down", c.system.n_down);
    b.read("t0", c.system.t0);
    b.read("U", c.system.U);
    b.read("a", c.system.a);
    b.finish();
  }
  {
    Block b(j, "drive");
    b.read("amplitude", c.drive.amplitude);
    b.read("omega0", c.drive.omega0);
    b.read("cycles", c.drive.cycles);
    std::string form = "sin2";
    b.read("form", form);
    c.drive.form = parse_form(form);
    b.finish();
  }
  {
    Block b(j, "tracking");
    if (const json* target = b.child("target")) {
      json wrapper{{"tracking.target", *target}};
      Block t(wrapper, "tracking.target");
      std::string source = to_string(c.tracking.target.source);
      t.read("source", source);
      c.tracking.target.source = parse_source(source);
      t.read("U", c.tracking.target.U);
      t.read("path", c.tracking.target.path);
      t.finish();
    }
    if (const json* scale = b.child("scale")) {
      if (scale->is_string() && scale->get<std::string>() == "auto") {
        c.tracking.auto_scale = true;
      } else if (scale->is_number()) {
        c.tracking.scale = scale->get<double>();
      } else {
        b.fail("scale", "must be a number or \"auto\"");
      }
    }
    b.read("safety", c.tracking.safety);
    b.read("shrink", c.tracking.shrink);
    b.read("max_attempts", c.tracking.max_attempts);
    b.read("eps1", c.tracking.constraints.eps1);
    b.read("eps2", c.tracking.constraints.eps2);
    b.read("enforce", c.tracking.constraints.enforce);
    b.finish();
  }
  {
    Block b(j, "grid");
    b.read("steps_per_cycle", c.grid.steps_per_cycle);
    b.read_optional("dt", c.grid.dt);
    b.read_optional("duration", c.grid.duration);
    b.read("tol", c.grid.tol);
    b.read("tracking_tol", c.grid.tracking_tol);
    b.finish();
  }
  {
    Block b(j, "observable");
    b.read("name", c.observable.name);
    b.finish();
  }
  {
    Block b(j, "output");
    b.read("snapshot_stride", c.output.snapshot_stride);
    std::string window = to_string(c.output.window);
    b.read("window", window);
    c.output.window = parse_window(window);
    b.read("write_state", c.output.write_state);
    b.finish();
  }
  {
    Block b(j, "solver");
    b.read("tol", c.solver.tol);
    b.read("seed", c.solver.seed);
    b.read("dense_limit", c.solver.dense_limit);
    b.read("krylov_size", c.solver.krylov_size);
    b.read("max_restarts", c.solver.max_restarts);
    b.finish();
  }
  {
    Block b(j, "filter");
    b.read("cutoffs", c.filter.cutoffs);
    b.read("include_nyquist", c.filter.include_nyquist);
    b.read("trajectory", c.filter.trajectory);
    b.finish();
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParameterError("config " + path.string() + ": " + e.what());
  }
  return parse_config(j);
}

void ExperimentConfig::validate() const {
  system.validate();
  drive.validate();
  tracking.constraints.validate();
  if (!std::isfinite(tracking.scale)) throw ParameterError("tracking.scale must be finite");
  if (!(tracking.safety > 0.0)) throw ParameterError("tracking.safety must be positive");
  if (!(tracking.shrink > 0.0 && tracking.shrink < 1.0)) {
    throw ParameterError("tracking.shrink must lie in (0, 1)");
  }
  if (tracking.max_attempts < 1) throw ParameterError("tracking.max_attempts must be >= 1");
  if (!(tracking.target.U >= 0.0)) throw ParameterError("tracking.target.U must be >= 0");
  if (tracking.target.source != TargetSource::Reference && tracking.target.path.empty()) {
    throw ParameterError("tracking.target.path is required for file and trajectory sources");
  }
  if (grid.steps_per_cycle < 1) throw ParameterError("grid.steps_per_cycle must be >= 1");
  if (grid.dt && !(*grid.dt > 0.0)) throw ParameterError("grid.dt must be positive");
  if (grid.duration && !(*grid.duration > 0.0)) throw ParameterError("grid.duration must be positive");
  if (!(grid.tol > 0.0)) throw ParameterError("grid.tol must be positive");
  if (!(grid.tracking_tol > 0.0)) throw ParameterError("grid.tracking_tol must be positive");
  if (!(solver.tol > 0.0)) throw ParameterError("solver.tol must be positive");
  if (solver.krylov_size < 2) throw ParameterError("solver.krylov_size must be >= 2");
  if (solver.max_restarts < 1) throw ParameterError("solver.max_restarts must be >= 1");
  for (double c : filter.cutoffs) {
    if (!(c >= 0.0)) throw ParameterError("filter.cutoffs must be non-negative");
  }
  time_grid();
}

TimeGrid ExperimentConfig::time_grid() const {
  const double T = grid.duration.value_or(drive.duration());
  const double dt = grid.dt.value_or(2.0 * std::numbers::pi / drive.omega0 / grid.steps_per_cycle);
  const double steps = std::round(T / dt);
  if (steps < 2.0) throw ParameterError("grid must contain at least two steps");
  if (std::abs(steps * dt - T) > 1e-9 * T) {
    throw ParameterError("grid.dt does not divide the duration into whole steps");
  }
  return {T / steps, static_cast<std::size_t>(steps)};
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["system"] = {{"L", c.system.L},   {"n_up", c.system.n_up}, {"n_down", c.system.n_down},
                 {"t0", c.system.t0}, {"U", c.system.U},       {"a", c.system.a}};
  j["drive"] = {{"amplitude", c.drive.amplitude},
                {"omega0", c.drive.omega0},
                {"cycles", c.drive.cycles},
                {"form", "sin2"}};
  json target{{"source", to_string(c.tracking.target.source)},
              {"U", c.tracking.target.U},
              {"path", c.tracking.target.path}};
  j["tracking"] = {{"target", target},
                   {"scale", c.tracking.auto_scale ? json("auto") : json(c.tracking.scale)},
                   {"safety", c.tracking.safety},
                   {"shrink", c.tracking.shrink},
                   {"max_attempts", c.tracking.max_attempts},
                   {"eps1", c.tracking.constraints.eps1},
                   {"eps2", c.tracking.constraints.eps2},
                   {"enforce", c.tracking.constraints.enforce}};
  const TimeGrid g = c.time_grid();
  j["grid"] = {{"steps_per_cycle", c.grid.steps_per_cycle},
               {"dt", g.dt},
               {"duration", g.end()},
               {"tol", c.grid.tol},
               {"tracking_tol", c.grid.tracking_tol}};
  j["observable"] = {{"name", c.observable.name}};
  j["output"] = {{"snapshot_stride", c.output.snapshot_stride},
                 {"window", to_string(c.output.window)},
                 {"write_state", c.output.write_state}};
  j["solver"] = {{"tol", c.solver.tol},
                 {"seed", c.solver.seed},
                 {"dense_limit", c.solver.dense_limit},
                 {"krylov_size", c.solver.krylov_size},
                 {"max_restarts", c.solver.max_restarts}};
  j["filter"] = {{"cutoffs", c.filter.cutoffs},
                 {"include_nyquist", c.filter.include_nyquist},
                 {"trajectory", c.filter.trajectory}};
  return j;
}

}  // namespace hubtrack
