#include "hubtrack/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "hubtrack/config.hpp"
#include "hubtrack/errors.hpp"
#include "hubtrack/experiments.hpp"
#include "hubtrack/io.hpp"

#ifndef HUBTRACK_VERSION
#define HUBTRACK_VERSION "0.0.0"
#endif

namespace hubtrack {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct RunState {
  fs::path out;
  json summary = json::object();
  std::vector<std::string> files;
  std::vector<ViolationRecord> violations;

  fs::path file(const std::string& name) {
    files.push_back(name);
    return out / name;
  }
};

std::string kind_name(ConstraintViolation::Kind k) {
  switch (k) {
    case ConstraintViolation::Kind::TrackingArgument: return "tracking_argument";
    case ConstraintViolation::Kind::BondMagnitude: return "bond_magnitude";
    case ConstraintViolation::Kind::Uncontrollable: return "uncontrollable";
  }
  return "unknown";
}

double max_norm_deviation(const Trajectory& tr) {
  double m = 0.0;
  for (double n : tr.norm) m = std::max(m, std::abs(n - 1.0));
  return m;
}

PropagationOptions propagation_options(const ExperimentConfig& cfg) {
  PropagationOptions o;
  o.tol = cfg.grid.tol;
  o.tracking_tol = cfg.grid.tracking_tol;
  o.snapshot_stride = cfg.output.snapshot_stride;
  return o;
}

json ehrenfest_summary(const Trajectory& tr, const SystemParams& p) {
  return {{"max_residual", ehrenfest_residual(tr, p, true).max_residual},
          {"max_residual_without_unwrap", ehrenfest_residual(tr, p, false).max_residual}};
}

void write_common(RunState& st, const Trajectory& tr, const ExperimentConfig& cfg,
                  const std::string& kind) {
  write_trajectory(st.file("trajectory.txt"), tr, kind);
  write_spectrum(st.file("spectrum.txt"), current_spectrum(tr, cfg.drive.omega0, cfg.output.window),
                 kind + " current");
  if (!tr.snapshots.empty()) write_snapshots(st.file("snapshots.txt"), tr.snapshots);
}

GroundStateResult solve_ground(const HubbardModel& model, const ExperimentConfig& cfg) {
  return ground_state(model, cfg.solver);
}

// ---------------------------------------------------------------------------
// targets

struct TargetData {
  TargetCurrent target;
  std::vector<double> reference_phi;  // empty when the source carries no field
};

void check_uniform(const std::vector<double>& t, double duration, const std::string& what) {
  if (t.size() < 3) throw ParameterError(what + ": needs at least three samples");
  const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  if (!(dt > 0.0)) throw ParameterError(what + ": time column must increase");
  const double slack = 1e-9 * std::max(1.0, std::abs(t.back()));
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (std::abs(t[i] - (t.front() + dt * static_cast<double>(i))) > slack) {
      throw ParameterError(what + ": time grid is not uniform");
    }
  }
  if (t.front() > slack || t.back() < duration - slack) {
    throw ParameterError(what + ": target does not cover [0, T]");
  }
}

TargetData load_target(const ExperimentConfig& cfg, const TimeGrid& grid, RunState& st) {
  const auto& tc = cfg.tracking.target;
  switch (tc.source) {
    case TargetSource::Reference: {
      SystemParams ref = cfg.system;
      ref.U = tc.U;
      const HubbardModel model(ref);
      const auto g = solve_ground(model, cfg);
      PropagationOptions o = propagation_options(cfg);
      o.snapshot_stride = 0;
      const Trajectory tr = propagate_driven(model, g.psi, cfg.drive, grid, o);
      write_trajectory(st.file("reference.txt"), tr, "drive (reference target)");
      double peak = 0.0;
      for (double j : tr.current) peak = std::max(peak, std::abs(j));
      st.summary["reference"] = {{"U", tc.U},
                                 {"max_norm_deviation", max_norm_deviation(tr)},
                                 {"max_abs_current", peak}};
      return {TargetCurrent(0.0, grid.dt, tr.current), tr.phi};
    }
    case TargetSource::File: {
      const Table t = read_table(tc.path);
      const auto& time = t.column("t");
      check_uniform(time, grid.end(), tc.path);
      const double dt = (time.back() - time.front()) / static_cast<double>(time.size() - 1);
      return {TargetCurrent(time.front(), dt, t.column("J")), {}};
    }
    case TargetSource::Trajectory: {
      const Trajectory tr = read_trajectory(tc.path);
      check_uniform(tr.time, grid.end(), tc.path);
      if (tr.current.empty()) throw ParameterError(tc.path + ": trajectory has no J column");
      const double dt = (tr.time.back() - tr.time.front()) / static_cast<double>(tr.size() - 1);
      return {TargetCurrent(tr.time.front(), dt, tr.current), tr.phi};
    }
  }
  throw ParameterError("unknown target source");
}

// Runs current tracking (dedicated or observable path) with fixed or automatic scale.
Trajectory run_current_tracking(const HubbardModel& model, const StateVector& psi0,
                                const TargetCurrent& target, const TimeGrid& grid,
                                const ExperimentConfig& cfg, bool as_observable, RunState& st) {
  const auto opts = propagation_options(cfg);
  const auto& c = cfg.tracking.constraints;
  std::function<Trajectory(const TargetCurrent&)> run = [&](const TargetCurrent& t) {
    return as_observable ? propagate_current_as_observable(model, psi0, t, grid, c, opts)
                         : propagate_tracking(model, psi0, t, grid, c, opts);
  };
  AutoScaleResult r;
  if (cfg.tracking.auto_scale) {
    const double start = auto_scale_start(model, psi0, target, cfg.tracking.safety);
    r = auto_scale(run, target, start, cfg.tracking.shrink, cfg.tracking.max_attempts);
  } else {
    r = {cfg.tracking.scale, 1, run(target.scaled(cfg.tracking.scale))};
  }
  st.summary["scale"] = r.scale;
  st.summary["scale_attempts"] = r.attempts;
  return std::move(r.trajectory);
}

void write_tracking_outputs(RunState& st, const Trajectory& tr, const ExperimentConfig& cfg,
                            const std::vector<double>& reference_phi, double reference_dt) {
  write_common(st, tr, cfg, "track");
  Table err;
  err.comments = {"tracking field and current error J - J_target"};
  err.names = {"t", "phi_T", "error"};
  err.columns = {tr.time, tr.phi, {}};
  for (std::size_t i = 0; i < tr.size(); ++i) err.columns[2].push_back(tr.current[i] - tr.target[i]);
  write_table(st.file("tracking.txt"), err);

  st.summary["max_tracking_error"] = tr.max_tracking_error;
  st.summary["max_norm_deviation"] = max_norm_deviation(tr);
  st.summary["min_R"] = *std::min_element(tr.R.begin(), tr.R.end());
  double max_x = 0.0;
  for (double x : tr.X) max_x = std::max(max_x, std::abs(x));
  st.summary["max_abs_X"] = max_x;
  st.summary["ehrenfest"] = ehrenfest_summary(tr, cfg.system);
  if (!reference_phi.empty() && reference_phi.size() >= 2) {
    const UniformCubicSpline ref(0.0, reference_dt, reference_phi);
    double m = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i) {
      m = std::max(m, std::abs(tr.phi[i] - ref.value(tr.time[i])));
    }
    st.summary["max_field_difference_to_reference"] = m;
  }
}

// ---------------------------------------------------------------------------
// commands

void cmd_ground(const ExperimentConfig& cfg, RunState& st) {
  const HubbardModel model(cfg.system);
  const auto g = solve_ground(model, cfg);
  const auto bond = model.bond_expectation(g.psi);
  json r{{"dim", model.dim()},
         {"energy", g.energy},
         {"residual", g.residual},
         {"bond_real", bond.K.real()},
         {"bond_imag", bond.K.imag()},
         {"doublons", model.doublon_expectation(g.psi)}};
  if (cfg.system.U == 0.0) {
    const double analytic = tight_binding_energy(cfg.system.L, cfg.system.n_up, cfg.system.t0) +
                            tight_binding_energy(cfg.system.L, cfg.system.n_down, cfg.system.t0);
    r["analytic_energy"] = analytic;
    r["analytic_difference"] = g.energy - analytic;
  }
  {
    std::ofstream out(st.file("ground.json"), std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write ground.json");
    out << r.dump(2) << '\n';
  }
  if (cfg.output.write_state) write_state(st.file("state.txt"), g.psi);
  st.summary = r;
}

void cmd_drive(const ExperimentConfig& cfg, RunState& st) {
  const HubbardModel model(cfg.system);
  const auto g = solve_ground(model, cfg);
  const auto tr = propagate_driven(model, g.psi, cfg.drive, cfg.time_grid(), propagation_options(cfg));
  write_common(st, tr, cfg, "drive");
  st.summary["ground_energy"] = g.energy;
  st.summary["max_norm_deviation"] = max_norm_deviation(tr);
  st.summary["energy_drift"] = std::abs(tr.energy.back() - tr.energy.front());
  st.summary["ehrenfest"] = ehrenfest_summary(tr, cfg.system);
}

void cmd_track(const ExperimentConfig& cfg, RunState& st, bool as_observable) {
  const TimeGrid grid = cfg.time_grid();
  const auto target = load_target(cfg, grid, st);
  const HubbardModel model(cfg.system);
  const auto g = solve_ground(model, cfg);
  const auto tr = run_current_tracking(model, g.psi, target.target, grid, cfg, as_observable, st);
  st.violations = tr.violations;
  write_tracking_outputs(st, tr, cfg, target.reference_phi, target.target.dt());
}

void cmd_track_observable(const ExperimentConfig& cfg, RunState& st, const std::string& name) {
  st.summary["observable"] = name;
  if (name == "current") {
    cmd_track(cfg, st, true);
    return;
  }
  const HubbardModel model(cfg.system);
  SparseOperator O;
  if (name == "doublon") {
    O = model.interaction();
  } else if (name == "bond-real") {
    O = linear_combination(1.0, model.bond_operator(), 1.0, model.bond_operator().adjoint());
  } else if (name == "number") {
    O = build_number_operator(model.basis());
  } else {
    throw ParameterError("unknown observable '" + name + "' (current, doublon, bond-real, number)");
  }
  const auto g = solve_ground(model, cfg);
  const double initial = O.expectation(g.psi).real();
  const auto tr = propagate_observable_tracking(model, g.psi, O, hold_target(initial),
                                                cfg.time_grid(), cfg.tracking.constraints,
                                                propagation_options(cfg));
  st.violations = tr.violations;
  write_common(st, tr, cfg, "track-observable " + name);
  st.summary["initial_value"] = initial;
  st.summary["max_deviation"] = max_abs_difference(tr.observable, tr.target);
  st.summary["max_norm_deviation"] = max_norm_deviation(tr);
}

void cmd_multiplicity_demo(const ExperimentConfig& cfg, RunState& st) {
  if (cfg.system.U != 0.0) throw ParameterError("multiplicity-demo requires U = 0");
  const TimeGrid grid = cfg.time_grid();
  const HubbardModel model(cfg.system);
  const auto g = solve_ground(model, cfg);
  const auto opts = propagation_options(cfg);
  const auto driven = propagate_driven(model, g.psi, cfg.drive, grid, opts);

  ConstraintConfig permissive = cfg.tracking.constraints;
  permissive.enforce = false;
  const TargetCurrent target(0.0, grid.dt, driven.current);
  const auto tracked = propagate_tracking(model, g.psi, target, grid, permissive, opts);
  st.violations = tracked.violations;

  Table demo;
  demo.comments = {"driven field phi and tracking field phi_T reproducing the same current"};
  demo.names = {"t", "phi", "phi_T", "J", "J_track"};
  demo.columns = {driven.time, driven.phi, tracked.phi, driven.current, tracked.current};
  write_table(st.file("demo.txt"), demo);
  write_trajectory(st.file("drive.txt"), driven, "drive");
  write_trajectory(st.file("track.txt"), tracked, "track (permissive)");

  double max_phi = 0.0, sin_diff = 0.0;
  for (std::size_t i = 0; i < driven.size(); ++i) {
    max_phi = std::max(max_phi, std::abs(driven.phi[i]));
    sin_diff = std::max(sin_diff, std::abs(std::sin(driven.phi[i]) - std::sin(tracked.phi[i])));
  }
  st.summary["max_abs_phi"] = max_phi;
  st.summary["crosses_half_pi"] = max_phi > std::numbers::pi / 2;
  st.summary["max_current_discrepancy"] = max_abs_difference(driven.current, tracked.current);
  st.summary["max_field_discrepancy"] = max_abs_difference(driven.phi, tracked.phi);
  st.summary["max_sin_discrepancy"] = sin_diff;
  st.summary["max_norm_deviation"] =
      std::max(max_norm_deviation(driven), max_norm_deviation(tracked));
}

void cmd_filter_sweep(const ExperimentConfig& cfg, RunState& st) {
  const HubbardModel model(cfg.system);
  const auto g = solve_ground(model, cfg);
  Trajectory tracking;
  if (!cfg.filter.trajectory.empty()) {
    tracking = read_trajectory(cfg.filter.trajectory);
  } else {
    const TimeGrid grid = cfg.time_grid();
    const auto target = load_target(cfg, grid, st);
    tracking = run_current_tracking(model, g.psi, target.target, grid, cfg, false, st);
    st.violations = tracking.violations;
    write_trajectory(st.file("trajectory.txt"), tracking, "track");
  }
  const double omega0 = cfg.drive.omega0;
  write_spectrum(st.file("spectrum_tracking.txt"),
                 current_spectrum(tracking, omega0, cfg.output.window), "tracking current");

  std::vector<double> cutoffs = cfg.filter.cutoffs;
  if (cfg.filter.include_nyquist) cutoffs.push_back(nyquist(tracking.dt()) / omega0);
  auto opts = propagation_options(cfg);
  opts.snapshot_stride = 0;
  const auto entries = filter_sweep(model, g.psi, tracking, cutoffs, omega0, cfg.output.window, opts);

  Table table;
  table.comments = {"below-cut-off relative L1 power mismatch against the tracking spectrum",
                    "ok = 0 marks a cut-off whose re-run failed (see manifest)"};
  table.names = {"cutoff", "mismatch", "ok"};
  table.columns.resize(3);
  json list = json::array();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    table.columns[0].push_back(e.cutoff);
    table.columns[1].push_back(e.mismatch);
    table.columns[2].push_back(e.ok ? 1.0 : 0.0);
    json item{{"cutoff", e.cutoff}, {"ok", e.ok}};
    if (e.ok) {
      const std::string name = "spectrum_wc_" + std::to_string(i) + ".txt";
      write_spectrum(st.file(name), e.spectrum,
                     "filtered re-run, cutoff " + format_double(e.cutoff) + " omega0");
      item["mismatch"] = e.mismatch;
      item["max_norm_deviation"] = e.max_norm_deviation;
      item["spectrum"] = name;
    } else {
      item["error"] = e.error;
    }
    list.push_back(item);
  }
  write_table(st.file("sweep.txt"), table);
  st.summary["entries"] = list;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"ground",           "drive",
                                              "track",            "track-observable",
                                              "multiplicity-demo", "filter-sweep"};
  return names;
}

ExitCode run_command(const std::string& command, const CommandOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  RunState st;
  st.out = options.out_dir;
  json manifest;
  manifest["command"] = command;
  manifest["version"] = HUBTRACK_VERSION;

#ifdef _OPENMP
  if (options.threads > 0) omp_set_num_threads(options.threads);
  const int threads = omp_get_max_threads();
#else
  const int threads = 1;
#endif

  ExitCode code = ExitCode::Ok;
  std::string message;
  json violation = nullptr;
  ExperimentConfig cfg;
  bool have_config = false;
  try {
    std::error_code ec;
    fs::create_directories(st.out, ec);
    if (ec) throw IoError("cannot create output directory " + st.out.string());

    cfg = options.config ? load_config(*options.config) : parse_config(json::object());
    if (options.seed) cfg.solver.seed = *options.seed;
    if (options.snapshot_stride) cfg.output.snapshot_stride = *options.snapshot_stride;
    if (options.observable) cfg.observable.name = *options.observable;
    cfg.validate();
    have_config = true;

    if (command == "ground") {
      cmd_ground(cfg, st);
    } else if (command == "drive") {
      cmd_drive(cfg, st);
    } else if (command == "track") {
      cmd_track(cfg, st, false);
    } else if (command == "track-observable") {
      cmd_track_observable(cfg, st, cfg.observable.name);
    } else if (command == "multiplicity-demo") {
      cmd_multiplicity_demo(cfg, st);
    } else if (command == "filter-sweep") {
      cmd_filter_sweep(cfg, st);
    } else {
      throw ParameterError("unknown command '" + command + "'");
    }
  } catch (const ConstraintViolation& e) {
    code = ExitCode::Constraint;
    message = e.what();
    violation = {{"kind", kind_name(e.kind())},
                 {"value", e.value()},
                 {"time", std::isfinite(e.time()) ? json(e.time()) : json(nullptr)}};
  } catch (const ParameterError& e) {
    code = ExitCode::Parameter;
    message = e.what();
  } catch (const SolverError& e) {
    code = ExitCode::Solver;
    message = e.what();
  } catch (const IntegratorError& e) {
    code = ExitCode::Integrator;
    message = e.what();
  } catch (const IoError& e) {
    code = ExitCode::Io;
    message = e.what();
  } catch (const ConsistencyError& e) {
    code = ExitCode::Consistency;
    message = e.what();
  } catch (const std::exception& e) {
    code = ExitCode::Unexpected;
    message = e.what();
  }

  manifest["status"] = code == ExitCode::Ok ? "ok" : "failed";
  manifest["exit_code"] = static_cast<int>(code);
  if (!message.empty()) manifest["message"] = message;
  if (!violation.is_null()) manifest["constraint_violation"] = violation;
  manifest["config"] = have_config ? to_json(cfg) : json(nullptr);
  manifest["seed"] = have_config ? cfg.solver.seed : options.seed.value_or(0);
  manifest["threads"] = threads;

  json files = json::object();
  for (const auto& name : st.files) {
    try {
      files[name] = sha256_file(st.out / name);
    } catch (const IoError&) {
      files[name] = nullptr;  // partially written output
    }
  }
  manifest["files"] = files;
  manifest["partial_outputs"] = code != ExitCode::Ok && !st.files.empty();

  json log = json::array();
  for (const auto& v : st.violations) {
    log.push_back({{"time", v.time}, {"kind", kind_name(v.kind)}, {"value", v.value}});
  }
  manifest["violations"] = log;
  manifest["summary"] = st.summary;
  manifest["wall_clock_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  try {
    std::ofstream out(st.out / "manifest.json", std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write manifest");
    out << manifest.dump(2) << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (code == ExitCode::Ok) code = ExitCode::Io;
  }

  if (code != ExitCode::Ok) {
    std::cerr << "error: " << message << '\n';
  } else if (options.verbose) {
    std::cout << st.summary.dump(2) << '\n';
  }
  return code;
}

}  // namespace hubtrack
