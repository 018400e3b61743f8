#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "hubtrack/errors.hpp"
#include "hubtrack/interpolation.hpp"
#include "hubtrack/operators.hpp"

namespace hubtrack {

// ---------------------------------------------------------------------------
// Fields, targets and grids
// ---------------------------------------------------------------------------

enum class PulseForm { Sin2Envelope };

/// Phi(t) = amplitude * sin^2(omega0 t / (2 cycles)) * sin(omega0 t) on [0, cycles * 2 pi / omega0].
struct PulseSpec {
  double amplitude = 0.0;
  double omega0 = 1.0;
  int cycles = 1;
  PulseForm form = PulseForm::Sin2Envelope;

  void validate() const;
  double duration() const;
  /// Zero outside [0, duration()].
  double operator()(double t) const;
};

/// Uniform grid t_n = n dt, n = 0..steps.
struct TimeGrid {
  double dt = 0.01;
  std::size_t steps = 0;

  static TimeGrid covering(double duration, std::size_t steps);
  double time(std::size_t n) const { return dt * static_cast<double>(n); }
  double end() const { return time(steps); }
};

using FieldFunction = std::function<double(double)>;

/// Control field given on a uniform grid, interpolated by a natural cubic spline.
class SampledField {
 public:
  SampledField(double t_start, double dt, std::vector<double> samples)
      : spline_(t_start, dt, std::move(samples)) {}
  double operator()(double t) const { return spline_.value(t); }
  const std::vector<double>& samples() const noexcept { return spline_.values(); }

 private:
  UniformCubicSpline spline_;
};

/// Target current J_s(t) = scale * J_T(t), J_T given on a uniform grid.
class TargetCurrent {
 public:
  TargetCurrent(double t_start, double dt, std::vector<double> samples, double scale = 1.0);

  double value(double t) const { return scale_ * spline_.value(t); }
  /// Analytic derivative of the interpolant.
  double derivative(double t) const { return scale_ * spline_.derivative(t); }
  double scale() const noexcept { return scale_; }
  TargetCurrent scaled(double scale) const;
  double max_abs() const;
  double t_start() const { return spline_.t_start(); }
  double t_end() const { return spline_.t_end(); }
  double dt() const { return spline_.dt(); }
  const std::vector<double>& samples() const noexcept { return spline_.values(); }

 private:
  UniformCubicSpline spline_;
  double scale_;
};

struct ConstraintConfig {
  double eps1 = 1e-3;
  double eps2 = 1e-8;
  /// When false, |X| >= 1 - eps1 is logged and X clamped to [-1, 1] instead of raising.
  bool enforce = true;

  void validate() const;
};

struct ViolationRecord {
  double time;
  ConstraintViolation::Kind kind;
  double value;
};

// ---------------------------------------------------------------------------
// Trajectory
// ---------------------------------------------------------------------------

/**
 * Per-step observables of a propagation. Series that do not apply to a run
 * (target, observable) are left empty.
 */
struct Trajectory {
  std::vector<double> time;
  std::vector<double> phi;
  std::vector<double> current;
  std::vector<double> target;
  std::vector<double> R;
  std::vector<double> theta;  // unwrapped
  std::vector<double> C;
  std::vector<double> kappa;  // unwrapped
  std::vector<double> norm;
  std::vector<double> energy;
  std::vector<double> X;
  std::vector<double> doublons;
  std::vector<double> observable;

  std::vector<std::pair<double, StateVector>> snapshots;
  StateVector final_state;
  std::vector<ViolationRecord> violations;
  double max_tracking_error = 0.0;

  std::size_t size() const noexcept { return time.size(); }
  double dt() const { return time.size() > 1 ? time[1] - time[0] : 0.0; }
};

struct PropagationOptions {
  /// Integrator tolerance; the run aborts once | ||psi|| - 1 | exceeds 10 * tol.
  double tol = 1e-9;
  /// Store every n-th state (0 disables snapshots; the final state is always kept).
  std::size_t snapshot_stride = 0;
  /// Accepted-step bound on |J - J_T| for current tracking.
  double tracking_tol = 1e-8;
};

// ---------------------------------------------------------------------------
// Driven propagation
// ---------------------------------------------------------------------------

/// RK4 integration of i d psi/dt = H(Phi(t)) psi.
Trajectory propagate_driven(const HubbardModel& model, const StateVector& psi0,
                            const FieldFunction& field, const TimeGrid& grid,
                            const PropagationOptions& opts = {});

// ---------------------------------------------------------------------------
// Current tracking
// ---------------------------------------------------------------------------

/// numerator / (2 t0 R_eff); shared by current and observable tracking.
inline double tracking_argument(double numerator, double t0, double R_eff) {
  return numerator / (2.0 * t0 * R_eff);
}

/// e^{-i Phi} for Phi = asin(-X) + theta, i.e. e^{-i theta} (sqrt(1 - X^2) + i X).
cplx tracking_phase(double X, double theta);

/// Representative of asin(-X) + theta + 2 pi n closest to prev_phi.
double continuous_branch(double X, double theta, double prev_phi);

/**
 * Tracking field Phi_T = asin(-X) + theta with X = J_T / (2 a t0 R), on the
 * branch continuous with prev_phi. Throws ConstraintViolation unless
 * R > eps2 and |X| < 1 - eps1 (with enforce = false, X is clamped instead).
 */
double reconstruct_phi(const BondExpectation& bond, double J_target, const SystemParams& params,
                       double prev_phi, const ConstraintConfig& constraints = {},
                       double time = NAN);
double reconstruct_phi(const HubbardModel& model, const StateVector& psi, double J_target,
                       double prev_phi, const ConstraintConfig& constraints = {},
                       double time = NAN);

/// -i H_T(J_T, psi) psi with H_T = sum [P_+ e^{-i theta} c^dag_j c_{j+1} + h.c.] + U D.
StateVector tracking_rhs(const HubbardModel& model, const StateVector& psi, double J_target,
                         const ConstraintConfig& constraints = {}, double time = NAN);

/// Field-free nonlinear evolution that reproduces target(t) in <J>.
Trajectory propagate_tracking(const HubbardModel& model, const StateVector& psi0,
                              const TargetCurrent& target, const TimeGrid& grid,
                              const ConstraintConfig& constraints = {},
                              const PropagationOptions& opts = {});

struct AutoScaleResult {
  double scale;
  int attempts;
  Trajectory trajectory;
};

/**
 * Chooses k so that tracking k * J_T stays inside the constraints. Starts from
 * k = min(1, safety * 2 a t0 R(psi0) / max|J_T|) and shrinks by `shrink` after
 * each failed attempt, returning the first run that completes.
 */
/// min(1, safety * 2 a t0 R(psi0) / max|J_T|), or 1 for a vanishing target.
double auto_scale_start(const HubbardModel& model, const StateVector& psi0,
                        const TargetCurrent& target, double safety);

/**
 * Runs `run` on target.scaled(k) from k = start, shrinking k after each
 * ConstraintViolation or IntegratorError until a run completes.
 */
AutoScaleResult auto_scale(const std::function<Trajectory(const TargetCurrent&)>& run,
                           const TargetCurrent& target, double start, double shrink,
                           int max_attempts);

AutoScaleResult track_with_auto_scale(const HubbardModel& model, const StateVector& psi0,
                                      const TargetCurrent& target, const TimeGrid& grid,
                                      const ConstraintConfig& constraints = {},
                                      const PropagationOptions& opts = {}, double safety = 0.95,
                                      double shrink = 0.8, int max_attempts = 25);

// ---------------------------------------------------------------------------
// Arbitrary observables
// ---------------------------------------------------------------------------

/// sum <[c^dag_j c_{j+1}, O]> = R_O e^{i theta_O} and B = i U <[D, O]>.
struct ObservableTerms {
  double R_O;
  double theta_O;
  double B;
};

ObservableTerms observable_tracking_terms(const HubbardModel& model, const StateVector& psi,
                                          const SparseOperator& O);

/// The current written in observable form: J = -2 t0 (a R) sin(Phi - theta) + 0.
ObservableTerms current_tracking_terms(const HubbardModel& model, const StateVector& psi);

/**
 * Phi_O = asin((B - dO/dt) / (2 t0 R_O)) + theta_O on the branch continuous
 * with prev_phi. When R_O <= eps2 and dO/dt matches B to 2 t0 eps2 every field
 * is admissible and prev_phi is returned; otherwise R_O <= eps2 raises.
 */
double observable_tracking_field(const ObservableTerms& terms, double dO_dt, double t0,
                                 double prev_phi, const ConstraintConfig& constraints = {},
                                 double time = NAN);

/// False when [K, O] vanishes identically, i.e. no field can move <O>.
bool is_controllable(const HubbardModel& model, const SparseOperator& O);

struct ObservableTarget {
  /// Target value O_T(t), recorded alongside the run.
  std::function<double(double)> value;
  /// dO_T/dt, the quantity the field law inverts.
  std::function<double(double)> derivative;
};

/// Holds O at its initial value: O_T(t) = O(psi0), dO_T/dt = 0.
ObservableTarget hold_target(double initial_value);

Trajectory propagate_observable_tracking(const HubbardModel& model, const StateVector& psi0,
                                         const SparseOperator& O, const ObservableTarget& target,
                                         const TimeGrid& grid,
                                         const ConstraintConfig& constraints = {},
                                         const PropagationOptions& opts = {});

/// Current tracking routed through the observable field law with current_tracking_terms.
Trajectory propagate_current_as_observable(const HubbardModel& model, const StateVector& psi0,
                                           const TargetCurrent& target, const TimeGrid& grid,
                                           const ConstraintConfig& constraints = {},
                                           const PropagationOptions& opts = {});

// ---------------------------------------------------------------------------
// Ehrenfest consistency
// ---------------------------------------------------------------------------

/// Removes 2 pi jumps so that successive differences lie in (-pi, pi].
std::vector<double> unwrap_phase(std::span<const double> series);

/// dJ/dt = -2 a t0 Phi' R cos(Phi - theta) + 2 a t0 U C cos(Phi - kappa).
double ehrenfest_rhs(double R, double theta, double C, double kappa, double phi,
                     double dphi_dt, const SystemParams& params);
double ehrenfest_rhs(const HubbardModel& model, const StateVector& psi, double phi,
                     double dphi_dt);

struct EhrenfestReport {
  double max_residual = 0.0;
  std::vector<double> analytic;
  std::vector<double> numeric;
};

/// Compares ehrenfest_rhs against the numerical gradient of the stored current.
EhrenfestReport ehrenfest_residual(const Trajectory& traj, const SystemParams& params,
                                   bool unwrap = true);

}  // namespace hubtrack
