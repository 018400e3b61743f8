#pragma once

#include <cstdint>

#include "hubtrack/operators.hpp"

namespace hubtrack {

struct GroundStateResult {
  double energy;
  StateVector psi;
  double residual;  // ||H psi - E psi||
};

struct GroundStateOptions {
  double tol = 1e-10;
  std::uint64_t seed = 20200131;
  /// Sectors up to this size are diagonalised densely.
  std::size_t dense_limit = 1024;
  int krylov_size = 60;
  int max_restarts = 200;
};

/**
 * Lowest eigenpair of H(phi = 0).
 *
 * Small sectors go through a dense Hermitian eigensolver; larger ones through
 * restarted Lanczos with full reorthogonalisation seeded by a fixed-seed real
 * start vector. For degenerate ground spaces the returned vector is whatever
 * the seeded iteration converges to: reproducible but not unique.
 */
GroundStateResult ground_state(const HubbardModel& model, const GroundStateOptions& opts = {});

/// Dense path only; throws ParameterError above a few thousand states.
GroundStateResult ground_state_dense(const HubbardModel& model);

/// Restarted Lanczos regardless of size.
GroundStateResult ground_state_lanczos(const HubbardModel& model,
                                       const GroundStateOptions& opts = {});

/// Non-interacting energy of N_sigma fermions filling the lowest ring modes.
double tight_binding_energy(int L, int n_sigma, double t0);

/**
 * U = 0 consistency: checks Re K(psi_g) = -E_g / (2 t0) to `tol` and returns
 * Im K(psi_g). Throws ConsistencyError on mismatch, ParameterError if U != 0.
 */
double ground_bond_check(const HubbardModel& model, const GroundStateResult& result,
                         double tol = 1e-8);

}  // namespace hubtrack
