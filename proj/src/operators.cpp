#include "hubtrack/operators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "hubtrack/errors.hpp"

namespace hubtrack {

namespace {

// Triplets of c^dagger_j c_{j+1} (adjoint=false) or c^dagger_{j+1} c_j (adjoint=true)
// restricted to one spin sector, in sector-local indices.
template <typename Sink>
void for_each_sector_hop(const std::vector<Mask>& states, int L, bool adjoint, Sink&& sink) {
  // index lookup by binary search; states are strictly increasing
  auto index_of = [&states](Mask m) {
    auto it = std::lower_bound(states.begin(), states.end(), m);
    return static_cast<std::size_t>(it - states.begin());
  };
  for (std::size_t src = 0; src < states.size(); ++src) {
    for (int j = 0; j < L; ++j) {
      // forward: move j+1 -> j ; adjoint: move j -> j+1
      const int from = adjoint ? j : (j + 1) % L;
      const int dir = adjoint ? +1 : -1;
      if (auto hop = hop_sign_and_target(states[src], from, dir, L)) {
        sink(index_of(hop->mask), src, static_cast<double>(hop->sign));
      }
    }
  }
}

// Row `i` of the (up x down) amplitude grid.
Eigen::Map<const Eigen::VectorXcd> grid_row(const cplx* data, std::size_t i, std::size_t nd) {
  return {data + i * nd, static_cast<Eigen::Index>(nd)};
}

}  // namespace

BondExpectation polar_bond(cplx K) {
  double theta = std::arg(K);
  if (theta <= -std::numbers::pi) theta = std::numbers::pi;
  return {K, std::abs(K), theta};
}

SparseOperator build_bond_operator(const SectorBasis& basis) {
  const auto& ups = basis.up_states();
  const auto& downs = basis.down_states();
  const std::size_t nd = downs.size();
  std::vector<Triplet> t;
  for_each_sector_hop(ups, basis.sites(), false, [&](std::size_t dst, std::size_t src, double s) {
    for (std::size_t k = 0; k < nd; ++k) t.push_back({dst * nd + k, src * nd + k, cplx{s, 0.0}});
  });
  for_each_sector_hop(downs, basis.sites(), false, [&](std::size_t dst, std::size_t src, double s) {
    for (std::size_t i = 0; i < ups.size(); ++i) {
      t.push_back({i * nd + dst, i * nd + src, cplx{s, 0.0}});
    }
  });
  return SparseOperator::from_triplets(basis.dim(), std::move(t));
}

SparseOperator build_interaction(const SectorBasis& basis) {
  std::vector<double> d(basis.dim());
  for (std::size_t s = 0; s < basis.dim(); ++s) {
    d[s] = std::popcount(basis.up_of(s) & basis.down_of(s));
  }
  return SparseOperator::diagonal(d);
}

SparseOperator build_number_operator(const SectorBasis& basis) {
  std::vector<double> n(basis.dim(), static_cast<double>(basis.n_up() + basis.n_down()));
  return SparseOperator::diagonal(n);
}

SparseOperator build_current_operator(const SparseOperator& K, double phi,
                                      const SystemParams& params) {
  const cplx pref{0.0, -params.a * params.t0};
  return linear_combination(pref * std::polar(1.0, -phi), K, -pref * std::polar(1.0, phi),
                            K.adjoint());
}

HubbardModel::SectorHopping HubbardModel::build_sector_hopping(const std::vector<Mask>& states,
                                                               int L, bool adjoint) {
  std::vector<Triplet> t;
  for_each_sector_hop(states, L, adjoint, [&](std::size_t dst, std::size_t src, double s) {
    t.push_back({dst, src, cplx{s, 0.0}});
  });
  const auto csr = SparseOperator::from_triplets(states.size(), std::move(t));
  SectorHopping h;
  h.offsets = csr.row_offsets();
  h.cols = csr.col_indices();
  h.vals.reserve(csr.nnz());
  for (const auto& v : csr.values()) h.vals.push_back(v.real());
  return h;
}

HubbardModel::HubbardModel(const SystemParams& params)
    : params_((params.validate(), params)), basis_(params) {
  K_ = build_bond_operator(basis_);
  D_ = build_interaction(basis_);
  doublons_.resize(basis_.dim());
  for (std::size_t s = 0; s < basis_.dim(); ++s) {
    doublons_[s] = std::popcount(basis_.up_of(s) & basis_.down_of(s));
  }
  up_fwd_ = build_sector_hopping(basis_.up_states(), params_.L, false);
  up_bwd_ = build_sector_hopping(basis_.up_states(), params_.L, true);
  down_fwd_ = build_sector_hopping(basis_.down_states(), params_.L, false);
  down_bwd_ = build_sector_hopping(basis_.down_states(), params_.L, true);
}

void HubbardModel::check_dim(const StateVector& psi) const {
  if (static_cast<std::size_t>(psi.size()) != basis_.dim()) {
    throw ParameterError("state dimension does not match the sector basis");
  }
}

void HubbardModel::apply_hopping(const StateVector& psi, cplx c_fwd, cplx c_bwd,
                                 double interaction, double shift, StateVector& out) const {
  check_dim(psi);
  out.resize(psi.size());
  const std::size_t nu = basis_.up_states().size();
  const std::size_t nd = basis_.down_states().size();
  const cplx* in = psi.data();
  cplx* res = out.data();
  const double U = interaction;
  const auto n_rows = static_cast<std::ptrdiff_t>(nu);
  const auto len = static_cast<Eigen::Index>(nd);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < n_rows; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    cplx* row = res + i * nd;
    const cplx* own = in + i * nd;
    const double* dbl = doublons_.data() + i * nd;
    for (std::size_t k = 0; k < nd; ++k) row[k] = (U * dbl[k] - shift) * own[k];

    // spin-up hops move whole rows of the amplitude grid
    Eigen::Map<Eigen::VectorXcd> row_vec(row, len);
    for (std::size_t p = up_fwd_.offsets[i]; p < up_fwd_.offsets[i + 1]; ++p) {
      row_vec.noalias() += (c_fwd * up_fwd_.vals[p]) * grid_row(in, up_fwd_.cols[p], nd);
    }
    for (std::size_t p = up_bwd_.offsets[i]; p < up_bwd_.offsets[i + 1]; ++p) {
      row_vec.noalias() += (c_bwd * up_bwd_.vals[p]) * grid_row(in, up_bwd_.cols[p], nd);
    }

    // spin-down hops act within the row
    for (std::size_t k = 0; k < nd; ++k) {
      cplx fwd = 0.0;
      for (std::size_t p = down_fwd_.offsets[k]; p < down_fwd_.offsets[k + 1]; ++p) {
        fwd += down_fwd_.vals[p] * own[down_fwd_.cols[p]];
      }
      cplx bwd = 0.0;
      for (std::size_t p = down_bwd_.offsets[k]; p < down_bwd_.offsets[k + 1]; ++p) {
        bwd += down_bwd_.vals[p] * own[down_bwd_.cols[p]];
      }
      row[k] += c_fwd * fwd + c_bwd * bwd;
    }
  }
}

void HubbardModel::apply_hamiltonian(const StateVector& psi, cplx hop_phase, double shift,
                                     StateVector& out) const {
  const double t0 = params_.t0;
  apply_hopping(psi, -t0 * hop_phase, -t0 * std::conj(hop_phase), params_.U, shift, out);
}

StateVector HubbardModel::apply_hamiltonian(const StateVector& psi, double phi) const {
  StateVector out;
  apply_hamiltonian(psi, std::polar(1.0, -phi), 0.0, out);
  return out;
}

StateVector HubbardModel::apply_bond(const StateVector& psi) const {
  StateVector out;
  apply_hopping(psi, 1.0, 0.0, 0.0, 0.0, out);
  return out;
}

StateVector HubbardModel::apply_bond_adjoint(const StateVector& psi) const {
  StateVector out;
  apply_hopping(psi, 0.0, 1.0, 0.0, 0.0, out);
  return out;
}

BondExpectation HubbardModel::bond_expectation(const StateVector& psi) const {
  check_dim(psi);
  const std::size_t nu = basis_.up_states().size();
  const std::size_t nd = basis_.down_states().size();
  const cplx* in = psi.data();
  cplx total = 0.0;
  for (std::size_t i = 0; i < nu; ++i) {
    const cplx* own = in + i * nd;
    cplx acc = 0.0;
    for (std::size_t p = up_fwd_.offsets[i]; p < up_fwd_.offsets[i + 1]; ++p) {
      acc += up_fwd_.vals[p] * grid_row(in, i, nd).dot(grid_row(in, up_fwd_.cols[p], nd));
    }
    for (std::size_t k = 0; k < nd; ++k) {
      cplx fwd = 0.0;
      for (std::size_t p = down_fwd_.offsets[k]; p < down_fwd_.offsets[k + 1]; ++p) {
        fwd += down_fwd_.vals[p] * own[down_fwd_.cols[p]];
      }
      acc += std::conj(own[k]) * fwd;
    }
    total += acc;
  }
  return polar_bond(total);
}

double HubbardModel::current_expectation(const StateVector& psi, double phi) const {
  const auto b = bond_expectation(psi);
  return -2.0 * params_.a * params_.t0 * b.R * std::sin(phi - b.theta);
}

CommutatorExpectation HubbardModel::doublon_bond_commutator(const StateVector& psi) const {
  // <psi|[D,K]|psi> = sum_{r,c} conj(psi_r) (d_r - d_c) K_rc psi_c
  check_dim(psi);
  const std::size_t nu = basis_.up_states().size();
  const std::size_t nd = basis_.down_states().size();
  const cplx* in = psi.data();
  const double* d = doublons_.data();
  cplx total = 0.0;
  for (std::size_t i = 0; i < nu; ++i) {
    const cplx* own = in + i * nd;
    const double* d_own = d + i * nd;
    cplx acc = 0.0;
    for (std::size_t p = up_fwd_.offsets[i]; p < up_fwd_.offsets[i + 1]; ++p) {
      const std::size_t src_row = up_fwd_.cols[p];
      const cplx* src = in + src_row * nd;
      const double* d_src = d + src_row * nd;
      cplx dot = 0.0;
      for (std::size_t k = 0; k < nd; ++k) dot += std::conj(own[k]) * (d_own[k] - d_src[k]) * src[k];
      acc += up_fwd_.vals[p] * dot;
    }
    for (std::size_t k = 0; k < nd; ++k) {
      cplx fwd = 0.0;
      for (std::size_t p = down_fwd_.offsets[k]; p < down_fwd_.offsets[k + 1]; ++p) {
        const std::size_t c = down_fwd_.cols[p];
        fwd += down_fwd_.vals[p] * (d_own[k] - d_own[c]) * own[c];
      }
      acc += std::conj(own[k]) * fwd;
    }
    total += acc;
  }
  const auto polar = polar_bond(total);
  return {total, polar.R, polar.theta};
}

double HubbardModel::energy(const StateVector& psi, double phi) const {
  StateVector h;
  apply_hamiltonian(psi, std::polar(1.0, -phi), 0.0, h);
  return psi.dot(h).real();  // Eigen's dot conjugates the first argument
}

double HubbardModel::doublon_expectation(const StateVector& psi) const {
  check_dim(psi);
  double acc = 0.0;
  for (Eigen::Index s = 0; s < psi.size(); ++s) {
    acc += doublons_[static_cast<std::size_t>(s)] * std::norm(psi[s]);
  }
  return acc;
}

}  // namespace hubtrack
