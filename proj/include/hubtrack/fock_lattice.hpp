#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

namespace hubtrack {

/// Occupation bitmask of one spin species; bit j set <=> site j occupied.
using Mask = std::uint32_t;

inline constexpr int kMaxSites = 32;

/**
 * Physical parameters of the periodic 1D Hubbard ring.
 *
 * Energies are in units chosen by the caller (typically t0 = 1), lengths in
 * units of the lattice constant and the electron charge is fixed to 1.
 */
struct SystemParams {
  int L = 2;
  int n_up = 1;
  int n_down = 1;
  double t0 = 1.0;
  double U = 0.0;
  double a = 1.0;
  double e = 1.0;

  /// Throws ParameterError unless 2 <= L <= 32, 0 <= N_sigma <= L, t0 > 0, U >= 0, a > 0, e = 1.
  void validate() const;
};

/// All L-bit masks with exactly N bits set, strictly increasing.
std::vector<Mask> enumerate_sector(int L, int N);

/// C(L, n_up) * C(L, n_down); throws ParameterError on invalid counts or overflow.
std::uint64_t dimension(int L, int n_up, int n_down);

struct HopResult {
  Mask mask;
  int sign;  // +1 or -1

  bool operator==(const HopResult&) const = default;
};

/**
 * Apply c^dagger_{j+dir} c_j to a single-spin occupation mask on a ring of L sites.
 *
 * The sign is (-1)^(occupied sites strictly between source and target in site
 * order 0..L-1). On the wrap link this yields (-1)^(N-1). Returns nullopt when
 * the source is empty or the target already occupied.
 */
std::optional<HopResult> hop_sign_and_target(Mask mask, int j, int dir, int L);

/// Fixed-(N_up, N_down) occupation basis; combined index = i_up * |down| + i_down.
class SectorBasis {
 public:
  SectorBasis(int L, int n_up, int n_down);
  explicit SectorBasis(const SystemParams& params)
      : SectorBasis(params.L, params.n_up, params.n_down) {}

  int sites() const noexcept { return L_; }
  int n_up() const noexcept { return n_up_; }
  int n_down() const noexcept { return n_down_; }
  std::size_t dim() const noexcept { return up_.size() * down_.size(); }

  const std::vector<Mask>& up_states() const noexcept { return up_; }
  const std::vector<Mask>& down_states() const noexcept { return down_; }

  std::optional<std::size_t> up_index(Mask m) const;
  std::optional<std::size_t> down_index(Mask m) const;
  /// Linear index of (up, down); nullopt if either mask is outside its sector.
  std::optional<std::size_t> index_of(Mask up, Mask down) const;

  Mask up_of(std::size_t index) const { return up_[index / down_.size()]; }
  Mask down_of(std::size_t index) const { return down_[index % down_.size()]; }

 private:
  int L_;
  int n_up_;
  int n_down_;
  std::vector<Mask> up_;
  std::vector<Mask> down_;
  std::unordered_map<Mask, std::size_t> up_lookup_;
  std::unordered_map<Mask, std::size_t> down_lookup_;
};

}  // namespace hubtrack
