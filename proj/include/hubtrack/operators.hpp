#pragma once

#include <vector>

#include "hubtrack/fock_lattice.hpp"
#include "hubtrack/sparse.hpp"

namespace hubtrack {

/// K = sum_{j,sigma} c^dagger_{j sigma} c_{j+1 sigma} on the ring, with fermionic signs.
SparseOperator build_bond_operator(const SectorBasis& basis);
/// Diagonal doublon count sum_j n_{j up} n_{j down} (U is applied by the caller).
SparseOperator build_interaction(const SectorBasis& basis);
/// Total particle number N_up + N_down (a multiple of the identity on a sector).
SparseOperator build_number_operator(const SectorBasis& basis);
/// Explicit current operator -i a t0 (e^{-i phi} K - e^{i phi} K^dagger).
SparseOperator build_current_operator(const SparseOperator& K, double phi,
                                      const SystemParams& params);

/// Polar form of <psi|K|psi>; theta is the principal value in (-pi, pi].
struct BondExpectation {
  cplx K;
  double R;
  double theta;
};

/// Polar form of <psi|[D, K]|psi> with D the doublon count.
struct CommutatorExpectation {
  cplx value;
  double C;
  double kappa;
};

/**
 * Hubbard ring with Peierls-phase hopping on one (N_up, N_down) sector:
 *
 *   H(phi) = -t0 (e^{-i phi} K + e^{i phi} K^dagger) + U D
 *
 * K, K^dagger and D are built once. Since K = K_up (x) 1 + 1 (x) K_down with no
 * cross-spin strings, products with states are evaluated per spin sector on
 * the (up x down) amplitude grid; the assembled CSR K is kept alongside for
 * generic observables.
 */
class HubbardModel {
 public:
  explicit HubbardModel(const SystemParams& params);

  const SystemParams& params() const noexcept { return params_; }
  const SectorBasis& basis() const noexcept { return basis_; }
  std::size_t dim() const noexcept { return basis_.dim(); }

  const SparseOperator& bond_operator() const noexcept { return K_; }
  const SparseOperator& interaction() const noexcept { return D_; }
  const std::vector<double>& doublons() const noexcept { return doublons_; }

  /**
   * out = [c_fwd K + c_bwd K^dagger + (interaction D - shift)] psi.
   * `out` must not alias `psi`.
   */
  void apply_hopping(const StateVector& psi, cplx c_fwd, cplx c_bwd, double interaction,
                     double shift, StateVector& out) const;

  /// out = (H(phi) - shift) psi, with hop_phase = e^{-i phi}.
  void apply_hamiltonian(const StateVector& psi, cplx hop_phase, double shift,
                         StateVector& out) const;
  StateVector apply_hamiltonian(const StateVector& psi, double phi) const;

  /// K psi and K^dagger psi.
  StateVector apply_bond(const StateVector& psi) const;
  StateVector apply_bond_adjoint(const StateVector& psi) const;

  BondExpectation bond_expectation(const StateVector& psi) const;
  /// -2 a t0 R sin(phi - theta)
  double current_expectation(const StateVector& psi, double phi) const;
  CommutatorExpectation doublon_bond_commutator(const StateVector& psi) const;
  /// Re <psi|H(phi)|psi>
  double energy(const StateVector& psi, double phi) const;
  double doublon_expectation(const StateVector& psi) const;

 private:
  struct SectorHopping {
    // rows: target sector index; entries: source index and summed sign
    std::vector<std::size_t> offsets{0};
    std::vector<std::size_t> cols;
    std::vector<double> vals;
  };

  static SectorHopping build_sector_hopping(const std::vector<Mask>& states, int L,
                                            bool adjoint);
  void check_dim(const StateVector& psi) const;

  SystemParams params_;
  SectorBasis basis_;
  SparseOperator K_;
  SparseOperator D_;
  std::vector<double> doublons_;
  SectorHopping up_fwd_, up_bwd_, down_fwd_, down_bwd_;
};

BondExpectation polar_bond(cplx K);

}  // namespace hubtrack
