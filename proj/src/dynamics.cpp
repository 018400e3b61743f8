#include "hubtrack/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hubtrack/spectral.hpp"

namespace hubtrack {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const cplx kMinusI{0.0, -1.0};

double wrap_to_pi(double x) { return std::remainder(x, kTwoPi); }

struct FieldSolution {
  double phi;
  double X;
  bool frozen;
};

void check_argument(double& X, const ConstraintConfig& c, double time,
                    std::vector<ViolationRecord>* log) {
  if (!std::isfinite(X)) {
    throw ConstraintViolation(ConstraintViolation::Kind::TrackingArgument, X, time,
                              "tracking argument is not finite");
  }
  if (std::abs(X) < 1.0 - c.eps1) return;
  if (c.enforce) {
    std::ostringstream msg;
    msg << "tracking argument |X| = " << std::abs(X) << " reached 1 - eps1 = " << 1.0 - c.eps1
        << " at t = " << time;
    throw ConstraintViolation(ConstraintViolation::Kind::TrackingArgument, X, time, msg.str());
  }
  if (log) log->push_back({time, ConstraintViolation::Kind::TrackingArgument, X});
  X = std::clamp(X, -1.0, 1.0);
}

[[noreturn]] void throw_small_bond(double R, double eps2, double time) {
  std::ostringstream msg;
  msg << "bond magnitude R = " << R << " <= eps2 = " << eps2 << " at t = " << time;
  throw ConstraintViolation(ConstraintViolation::Kind::BondMagnitude, R, time, msg.str());
}

FieldSolution solve_current_field(const BondExpectation& bond, double J_target,
                                  const SystemParams& params, double prev_phi,
                                  const ConstraintConfig& c, double time,
                                  std::vector<ViolationRecord>* log) {
  if (!(bond.R > c.eps2)) throw_small_bond(bond.R, c.eps2, time);
  double X = tracking_argument(J_target, params.t0, params.a * bond.R);
  check_argument(X, c, time, log);
  return {continuous_branch(X, bond.theta, prev_phi), X, false};
}

FieldSolution solve_observable_field(const ObservableTerms& terms, double dO_dt, double t0,
                                     double prev_phi, const ConstraintConfig& c, double time,
                                     std::vector<ViolationRecord>* log) {
  const double numerator = dO_dt - terms.B;
  if (!(terms.R_O > c.eps2)) {
    if (std::abs(numerator) <= 2.0 * t0 * c.eps2) return {prev_phi, 0.0, true};
    std::ostringstream msg;
    msg << "R_O = " << terms.R_O << " <= eps2 while dO/dt - B = " << numerator << " at t = "
        << time;
    throw ConstraintViolation(ConstraintViolation::Kind::BondMagnitude, terms.R_O, time,
                              msg.str());
  }
  double X = tracking_argument(numerator, t0, terms.R_O);
  check_argument(X, c, time, log);
  return {continuous_branch(X, terms.theta_O, prev_phi), X, false};
}

// Field for one RK stage: e^{-i phi} plus the representative phi and X.
struct StageField {
  cplx hop_phase;
  double phi;
  double X;
};

using StageLaw = std::function<StageField(const StateVector&, double t, double prev_phi)>;

struct RunSpec {
  StageLaw law;
  double initial_phi = 0.0;
  std::function<double(double)> target;                      // empty: no target column
  std::function<double(const StateVector&)> observable;      // empty: no observable column
  bool check_tracking = false;
};

void record(const HubbardModel& model, const StateVector& psi, double t, const StageField& f,
            double energy, const RunSpec& spec, Trajectory& tr) {
  const auto& p = model.params();
  const auto bond = model.bond_expectation(psi);
  const auto comm = model.doublon_bond_commutator(psi);
  const double J = -2.0 * p.a * p.t0 * bond.R * std::sin(f.phi - bond.theta);

  auto unwrap_next = [](std::vector<double>& series, double principal) {
    series.push_back(series.empty() ? principal
                                    : series.back() + wrap_to_pi(principal - series.back()));
  };

  tr.time.push_back(t);
  tr.phi.push_back(f.phi);
  tr.current.push_back(J);
  tr.R.push_back(bond.R);
  unwrap_next(tr.theta, bond.theta);
  tr.C.push_back(comm.C);
  unwrap_next(tr.kappa, comm.kappa);
  tr.norm.push_back(psi.norm());
  tr.energy.push_back(energy / psi.squaredNorm());
  double X = f.X;
  if (!std::isfinite(X)) X = bond.R > 0.0 ? J / (2.0 * p.a * p.t0 * bond.R) : 0.0;
  tr.X.push_back(X);
  tr.doublons.push_back(model.doublon_expectation(psi));
  if (spec.target) {
    const double target = spec.target(t);
    tr.target.push_back(target);
    if (spec.check_tracking) {
      tr.max_tracking_error = std::max(tr.max_tracking_error, std::abs(J - target));
    }
  }
  if (spec.observable) tr.observable.push_back(spec.observable(psi));
}

/**
 * RK4 with a per-step energy shift: each step integrates
 * d psi/dt = -i (H - E_n) psi with E_n = <psi_n|H_n|psi_n>, and the dropped
 * global phase exp(-i sum E_n dt) is restored on stored states.
 */
Trajectory integrate(const HubbardModel& model, const StateVector& psi0, const TimeGrid& grid,
                     const PropagationOptions& opts, const RunSpec& spec) {
  if (!(grid.dt > 0.0) || !std::isfinite(grid.dt)) throw ParameterError("dt must be positive");
  if (!(opts.tol > 0.0)) throw ParameterError("integrator tolerance must be positive");
  if (static_cast<std::size_t>(psi0.size()) != model.dim()) {
    throw ParameterError("initial state dimension does not match the sector");
  }
  if (std::abs(psi0.norm() - 1.0) > 10.0 * opts.tol) {
    throw ParameterError("initial state is not normalised");
  }

  Trajectory tr;
  const std::size_t n_rec = grid.steps + 1;
  for (auto* v : {&tr.time, &tr.phi, &tr.current, &tr.R, &tr.theta, &tr.C, &tr.kappa, &tr.norm,
                  &tr.energy, &tr.X, &tr.doublons}) {
    v->reserve(n_rec);
  }

  const double dt = grid.dt;
  StateVector psi = psi0;
  StateVector h(psi.size()), stage(psi.size()), k(psi.size()), acc(psi.size());
  double gauge = 0.0;  // accumulated sum of E_n dt
  double prev_phi = spec.initial_phi;

  auto snapshot = [&](std::size_t n, double t) {
    if (opts.snapshot_stride > 0 && n % opts.snapshot_stride == 0) {
      tr.snapshots.emplace_back(t, std::polar(1.0, -gauge) * psi);
    }
  };

  for (std::size_t n = 0;; ++n) {
    const double t = grid.time(n);
    const StageField f1 = spec.law(psi, t, prev_phi);
    model.apply_hamiltonian(psi, f1.hop_phase, 0.0, h);
    const double E = psi.dot(h).real();

    record(model, psi, t, f1, E, spec, tr);
    snapshot(n, t);
    prev_phi = f1.phi;

    const double deviation = std::abs(tr.norm.back() - 1.0);
    if (!std::isfinite(deviation) || deviation > 10.0 * opts.tol) {
      std::ostringstream msg;
      msg << "norm drift " << deviation << " exceeds 10 * tol at t = " << t;
      throw IntegratorError(msg.str(), t);
    }
    if (n == grid.steps) break;

    // k1
    k.noalias() = kMinusI * (h - E * psi);
    acc = k;
    stage = psi + (0.5 * dt) * k;
    // k2, k3
    for (int s = 0; s < 2; ++s) {
      const StageField f = spec.law(stage, t + 0.5 * dt, prev_phi);
      model.apply_hamiltonian(stage, f.hop_phase, E, h);
      k.noalias() = kMinusI * h;
      acc += 2.0 * k;
      stage = psi + (s == 0 ? 0.5 * dt : dt) * k;
    }
    // k4
    const StageField f4 = spec.law(stage, t + dt, prev_phi);
    model.apply_hamiltonian(stage, f4.hop_phase, E, h);
    acc += kMinusI * h;

    psi += (dt / 6.0) * acc;
    gauge += E * dt;
  }

  if (spec.check_tracking && tr.max_tracking_error > opts.tracking_tol) {
    std::ostringstream msg;
    msg << "tracked current deviates from target by " << tr.max_tracking_error;
    throw ConsistencyError(msg.str());
  }
  tr.final_state = std::polar(1.0, -gauge) * psi;
  return tr;
}

StageField current_stage(const HubbardModel& model, const StateVector& psi,
                         const TargetCurrent& target, double t, double prev_phi,
                         const ConstraintConfig& c, std::vector<ViolationRecord>* log) {
  const auto bond = model.bond_expectation(psi);
  const auto s = solve_current_field(bond, target.value(t), model.params(), prev_phi, c, t, log);
  return {tracking_phase(s.X, bond.theta), s.phi, s.X};
}

StageField observable_stage(const ObservableTerms& terms, double dO_dt, double t0, double t,
                            double prev_phi, const ConstraintConfig& c,
                            std::vector<ViolationRecord>* log) {
  const auto s = solve_observable_field(terms, dO_dt, t0, prev_phi, c, t, log);
  if (s.frozen) return {std::polar(1.0, -prev_phi), s.phi, s.X};
  return {tracking_phase(s.X, terms.theta_O), s.phi, s.X};
}

}  // namespace

// ---------------------------------------------------------------------------

void PulseSpec::validate() const {
  if (!std::isfinite(amplitude)) throw ParameterError("pulse amplitude must be finite");
  if (!(omega0 > 0.0) || !std::isfinite(omega0)) throw ParameterError("omega0 must be positive");
  if (cycles < 1) throw ParameterError("pulse needs at least one cycle");
}

double PulseSpec::duration() const { return kTwoPi * cycles / omega0; }

double PulseSpec::operator()(double t) const {
  if (t <= 0.0 || t >= duration()) return 0.0;
  const double env = std::sin(omega0 * t / (2.0 * cycles));
  return amplitude * env * env * std::sin(omega0 * t);
}

TimeGrid TimeGrid::covering(double duration, std::size_t steps) {
  if (!(duration > 0.0) || steps == 0) throw ParameterError("grid needs positive duration and steps");
  return {duration / static_cast<double>(steps), steps};
}

TargetCurrent::TargetCurrent(double t_start, double dt, std::vector<double> samples, double scale)
    : spline_(t_start, dt, std::move(samples)), scale_(scale) {
  if (!std::isfinite(scale_)) throw ParameterError("target scale must be finite");
}

TargetCurrent TargetCurrent::scaled(double scale) const {
  TargetCurrent copy = *this;
  copy.scale_ = scale;
  return copy;
}

double TargetCurrent::max_abs() const {
  double m = 0.0;
  for (double v : spline_.values()) m = std::max(m, std::abs(v));
  return std::abs(scale_) * m;
}

void ConstraintConfig::validate() const {
  if (!(eps1 > 0.0 && eps1 < 1.0)) throw ParameterError("eps1 must lie in (0, 1)");
  if (!(eps2 > 0.0)) throw ParameterError("eps2 must be positive");
}

// ---------------------------------------------------------------------------

Trajectory propagate_driven(const HubbardModel& model, const StateVector& psi0,
                            const FieldFunction& field, const TimeGrid& grid,
                            const PropagationOptions& opts) {
  RunSpec spec;
  spec.law = [&field](const StateVector&, double t, double) {
    const double phi = field(t);
    return StageField{std::polar(1.0, -phi), phi, NAN};
  };
  spec.initial_phi = field(0.0);
  return integrate(model, psi0, grid, opts, spec);
}

cplx tracking_phase(double X, double theta) {
  return std::polar(1.0, -theta) * cplx{std::sqrt(1.0 - X * X), X};
}

double continuous_branch(double X, double theta, double prev_phi) {
  const double base = std::asin(-X) + theta;
  const double turns = std::round((prev_phi - base) / kTwoPi);
  return base + kTwoPi * turns;
}

double reconstruct_phi(const BondExpectation& bond, double J_target, const SystemParams& params,
                       double prev_phi, const ConstraintConfig& constraints, double time) {
  return solve_current_field(bond, J_target, params, prev_phi, constraints, time, nullptr).phi;
}

double reconstruct_phi(const HubbardModel& model, const StateVector& psi, double J_target,
                       double prev_phi, const ConstraintConfig& constraints, double time) {
  return reconstruct_phi(model.bond_expectation(psi), J_target, model.params(), prev_phi,
                         constraints, time);
}

StateVector tracking_rhs(const HubbardModel& model, const StateVector& psi, double J_target,
                         const ConstraintConfig& constraints, double time) {
  const auto bond = model.bond_expectation(psi);
  const auto s = solve_current_field(bond, J_target, model.params(), 0.0, constraints, time,
                                     nullptr);
  StateVector h;
  model.apply_hamiltonian(psi, tracking_phase(s.X, bond.theta), 0.0, h);
  return kMinusI * h;
}

Trajectory propagate_tracking(const HubbardModel& model, const StateVector& psi0,
                              const TargetCurrent& target, const TimeGrid& grid,
                              const ConstraintConfig& constraints,
                              const PropagationOptions& opts) {
  constraints.validate();
  std::vector<ViolationRecord> log;
  RunSpec spec;
  spec.law = [&](const StateVector& psi, double t, double prev) {
    return current_stage(model, psi, target, t, prev, constraints, &log);
  };
  spec.target = [&target](double t) { return target.value(t); };
  spec.check_tracking = constraints.enforce;
  Trajectory tr = integrate(model, psi0, grid, opts, spec);
  tr.violations = std::move(log);
  return tr;
}

double auto_scale_start(const HubbardModel& model, const StateVector& psi0,
                        const TargetCurrent& target, double safety) {
  if (!(safety > 0.0)) throw ParameterError("auto-scale safety must be positive");
  const auto& p = model.params();
  const double peak = target.scaled(1.0).max_abs();
  if (peak == 0.0) return 1.0;
  return std::min(1.0, safety * 2.0 * p.a * p.t0 * model.bond_expectation(psi0).R / peak);
}

AutoScaleResult auto_scale(const std::function<Trajectory(const TargetCurrent&)>& run,
                           const TargetCurrent& target, double start, double shrink,
                           int max_attempts) {
  if (!(shrink > 0.0 && shrink < 1.0) || max_attempts < 1 || !(start > 0.0)) {
    throw ParameterError("invalid auto-scale settings");
  }
  double k = start;
  for (int attempt = 1;; ++attempt) {
    try {
      auto tr = run(target.scaled(k));
      return {k, attempt, std::move(tr)};
    } catch (const ConstraintViolation&) {
      if (attempt >= max_attempts) throw;
    } catch (const IntegratorError&) {
      // fields near the |X| -> 1 boundary grow steep enough to break the step size first
      if (attempt >= max_attempts) throw;
    }
    k *= shrink;
  }
}

AutoScaleResult track_with_auto_scale(const HubbardModel& model, const StateVector& psi0,
                                      const TargetCurrent& target, const TimeGrid& grid,
                                      const ConstraintConfig& constraints,
                                      const PropagationOptions& opts, double safety,
                                      double shrink, int max_attempts) {
  return auto_scale(
      [&](const TargetCurrent& scaled) {
        return propagate_tracking(model, psi0, scaled, grid, constraints, opts);
      },
      target, auto_scale_start(model, psi0, target, safety), shrink, max_attempts);
}

// ---------------------------------------------------------------------------

ObservableTerms observable_tracking_terms(const HubbardModel& model, const StateVector& psi,
                                          const SparseOperator& O) {
  if (O.dim() != model.dim()) throw ParameterError("observable dimension does not match sector");
  const StateVector Opsi = O.apply(psi);
  const StateVector Kpsi = model.apply_bond(psi);
  const StateVector Kdag_psi = model.apply_bond_adjoint(psi);
  // <[K, O]> = <K^dag psi|O psi> - <O psi|K psi>
  const cplx W = Kdag_psi.dot(Opsi) - Opsi.dot(Kpsi);
  const auto polar = polar_bond(W);
  // i U <[D, O]> = -2 U Im <D psi|O psi>
  const auto& d = model.doublons();
  cplx DO = 0.0;
  for (Eigen::Index s = 0; s < psi.size(); ++s) {
    DO += d[static_cast<std::size_t>(s)] * std::conj(psi[s]) * Opsi[s];
  }
  return {polar.R, polar.theta, -2.0 * model.params().U * DO.imag()};
}

ObservableTerms current_tracking_terms(const HubbardModel& model, const StateVector& psi) {
  const auto bond = model.bond_expectation(psi);
  return {model.params().a * bond.R, bond.theta, 0.0};
}

double observable_tracking_field(const ObservableTerms& terms, double dO_dt, double t0,
                                 double prev_phi, const ConstraintConfig& constraints,
                                 double time) {
  return solve_observable_field(terms, dO_dt, t0, prev_phi, constraints, time, nullptr).phi;
}

bool is_controllable(const HubbardModel& model, const SparseOperator& O) {
  if (O.dim() != model.dim()) throw ParameterError("observable dimension does not match sector");
  return commutator(model.bond_operator(), O).max_abs() > 0.0;
}

ObservableTarget hold_target(double initial_value) {
  return {[initial_value](double) { return initial_value; }, [](double) { return 0.0; }};
}

Trajectory propagate_observable_tracking(const HubbardModel& model, const StateVector& psi0,
                                         const SparseOperator& O, const ObservableTarget& target,
                                         const TimeGrid& grid,
                                         const ConstraintConfig& constraints,
                                         const PropagationOptions& opts) {
  constraints.validate();
  if (!target.value || !target.derivative) throw ParameterError("observable target is incomplete");
  if (!is_controllable(model, O)) {
    throw ConstraintViolation(ConstraintViolation::Kind::Uncontrollable, 0.0, 0.0,
                              "observable commutes with the hopping: R_O vanishes identically");
  }
  std::vector<ViolationRecord> log;
  const double t0 = model.params().t0;
  RunSpec spec;
  spec.law = [&](const StateVector& psi, double t, double prev) {
    return observable_stage(observable_tracking_terms(model, psi, O), target.derivative(t), t0,
                            t, prev, constraints, &log);
  };
  spec.target = target.value;
  spec.observable = [&O](const StateVector& psi) { return O.expectation(psi).real(); };
  Trajectory tr = integrate(model, psi0, grid, opts, spec);
  tr.violations = std::move(log);
  return tr;
}

Trajectory propagate_current_as_observable(const HubbardModel& model, const StateVector& psi0,
                                           const TargetCurrent& target, const TimeGrid& grid,
                                           const ConstraintConfig& constraints,
                                           const PropagationOptions& opts) {
  constraints.validate();
  std::vector<ViolationRecord> log;
  const double t0 = model.params().t0;
  RunSpec spec;
  spec.law = [&](const StateVector& psi, double t, double prev) {
    return observable_stage(current_tracking_terms(model, psi), target.value(t), t0, t, prev,
                            constraints, &log);
  };
  spec.target = [&target](double t) { return target.value(t); };
  spec.check_tracking = constraints.enforce;
  Trajectory tr = integrate(model, psi0, grid, opts, spec);
  tr.violations = std::move(log);
  return tr;
}

// ---------------------------------------------------------------------------

std::vector<double> unwrap_phase(std::span<const double> series) {
  std::vector<double> out(series.begin(), series.end());
  for (std::size_t i = 1; i < out.size(); ++i) {
    out[i] = out[i - 1] + wrap_to_pi(series[i] - series[i - 1]);
  }
  return out;
}

double ehrenfest_rhs(double R, double theta, double C, double kappa, double phi, double dphi_dt,
                     const SystemParams& p) {
  const double scale = 2.0 * p.a * p.t0;
  return -scale * dphi_dt * R * std::cos(phi - theta) + scale * p.U * C * std::cos(phi - kappa);
}

double ehrenfest_rhs(const HubbardModel& model, const StateVector& psi, double phi,
                     double dphi_dt) {
  const auto bond = model.bond_expectation(psi);
  const auto comm = model.doublon_bond_commutator(psi);
  return ehrenfest_rhs(bond.R, bond.theta, comm.C, comm.kappa, phi, dphi_dt, model.params());
}

EhrenfestReport ehrenfest_residual(const Trajectory& traj, const SystemParams& params,
                                   bool unwrap) {
  const std::size_t n = traj.size();
  if (n < 3) throw ParameterError("Ehrenfest residual needs at least three samples");
  const double dt = traj.dt();

  // without unwrapping the field is taken as stored modulo 2 pi, as a naive
  // principal-value assignment of theta would produce
  std::vector<double> phi(traj.phi);
  if (unwrap) {
    phi = unwrap_phase(phi);
  } else {
    for (double& v : phi) v = wrap_to_pi(v);
  }

  EhrenfestReport rep;
  rep.numeric = numerical_gradient(traj.current, dt);
  const auto dphi = numerical_gradient(phi, dt);
  rep.analytic.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    rep.analytic[i] = ehrenfest_rhs(traj.R[i], traj.theta[i], traj.C[i], traj.kappa[i], phi[i],
                                    dphi[i], params);
    rep.max_residual = std::max(rep.max_residual, std::abs(rep.analytic[i] - rep.numeric[i]));
  }
  return rep;
}

}  // namespace hubtrack
