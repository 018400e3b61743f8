#include "hubtrack/fock_lattice.hpp"

#include <bit>
#include <limits>
#include <sstream>

#include "hubtrack/errors.hpp"

namespace hubtrack {

namespace {

void check_counts(int L, int N) {
  if (L < 1 || L > kMaxSites) {
    std::ostringstream msg;
    msg << "site count L=" << L << " outside [1, " << kMaxSites << "]";
    throw ParameterError(msg.str());
  }
  if (N < 0 || N > L) {
    std::ostringstream msg;
    msg << "particle count N=" << N << " outside [0, L=" << L << "]";
    throw ParameterError(msg.str());
  }
}

std::uint64_t binomial(int n, int k) {
  if (k > n - k) k = n - k;
  std::uint64_t c = 1;
  for (int i = 1; i <= k; ++i) {
    // c * (n - k + i) / i stays integral at every step
    const std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
    if (c > std::numeric_limits<std::uint64_t>::max() / num) {
      throw ParameterError("binomial coefficient overflows 64 bits");
    }
    c = c * num / static_cast<std::uint64_t>(i);
  }
  return c;
}

// Next larger integer with the same popcount (Gosper's hack).
std::uint64_t next_same_popcount(std::uint64_t v) {
  const std::uint64_t t = v | (v - 1);
  return (t + 1) | (((~t & -~t) - 1) >> (std::countr_zero(v) + 1));
}

}  // namespace

void SystemParams::validate() const {
  if (L < 2 || L > kMaxSites) {
    std::ostringstream msg;
    msg << "site count L=" << L << " outside [2, " << kMaxSites << "]";
    throw ParameterError(msg.str());
  }
  check_counts(L, n_up);
  check_counts(L, n_down);
  if (!(t0 > 0.0)) throw ParameterError("hopping t0 must be positive");
  if (!(U >= 0.0)) throw ParameterError("interaction U must be non-negative");
  if (!(a > 0.0)) throw ParameterError("lattice constant a must be positive");
  if (e != 1.0) throw ParameterError("charge e is fixed to 1");
}

std::vector<Mask> enumerate_sector(int L, int N) {
  check_counts(L, N);
  std::vector<Mask> out;
  out.reserve(binomial(L, N));
  if (N == 0) {
    out.push_back(0);
    return out;
  }
  const std::uint64_t last = ((std::uint64_t{1} << N) - 1) << (L - N);
  for (std::uint64_t v = (std::uint64_t{1} << N) - 1;; v = next_same_popcount(v)) {
    out.push_back(static_cast<Mask>(v));
    if (v == last) break;
  }
  return out;
}

std::uint64_t dimension(int L, int n_up, int n_down) {
  check_counts(L, n_up);
  check_counts(L, n_down);
  const std::uint64_t a = binomial(L, n_up);
  const std::uint64_t b = binomial(L, n_down);
  if (a > std::numeric_limits<std::uint64_t>::max() / b) {
    throw ParameterError("sector dimension overflows 64 bits");
  }
  return a * b;
}

std::optional<HopResult> hop_sign_and_target(Mask mask, int j, int dir, int L) {
  const int target = ((j + dir) % L + L) % L;
  const Mask src_bit = Mask{1} << j;
  const Mask dst_bit = Mask{1} << target;
  if (!(mask & src_bit) || (mask & dst_bit)) return std::nullopt;

  const int lo = std::min(j, target);
  const int hi = std::max(j, target);
  // sites strictly between lo and hi
  const std::uint64_t between =
      ((std::uint64_t{1} << hi) - 1) & ~((std::uint64_t{1} << (lo + 1)) - 1);
  const int crossed = std::popcount(static_cast<std::uint64_t>(mask) & between);
  return HopResult{static_cast<Mask>((mask & ~src_bit) | dst_bit), (crossed % 2) ? -1 : 1};
}

SectorBasis::SectorBasis(int L, int n_up, int n_down)
    : L_(L), n_up_(n_up), n_down_(n_down) {
  dimension(L, n_up, n_down);  // validates counts and overflow
  up_ = enumerate_sector(L, n_up);
  down_ = enumerate_sector(L, n_down);
  up_lookup_.reserve(up_.size());
  down_lookup_.reserve(down_.size());
  for (std::size_t i = 0; i < up_.size(); ++i) up_lookup_.emplace(up_[i], i);
  for (std::size_t i = 0; i < down_.size(); ++i) down_lookup_.emplace(down_[i], i);
}

std::optional<std::size_t> SectorBasis::up_index(Mask m) const {
  auto it = up_lookup_.find(m);
  if (it == up_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> SectorBasis::down_index(Mask m) const {
  auto it = down_lookup_.find(m);
  if (it == down_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> SectorBasis::index_of(Mask up, Mask down) const {
  const auto iu = up_index(up);
  const auto id = down_index(down);
  if (!iu || !id) return std::nullopt;
  return *iu * down_.size() + *id;
}

}  // namespace hubtrack
