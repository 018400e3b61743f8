#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace hubtrack {

using cplx = std::complex<double>;

/// Complex amplitudes over a SectorBasis, indexed by the combined basis index.
using StateVector = Eigen::VectorXcd;

struct Triplet {
  std::size_t row;
  std::size_t col;
  cplx value;
};

/**
 * Square compressed-row complex matrix.
 *
 * Only structurally present entries are stored: duplicates are summed on
 * construction and entries that sum to exactly zero are dropped.
 */
class SparseOperator {
 public:
  SparseOperator() = default;

  static SparseOperator from_triplets(std::size_t dim, std::vector<Triplet> entries);
  static SparseOperator diagonal(std::span<const double> diag);
  static SparseOperator identity(std::size_t dim);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t nnz() const noexcept { return values_.size(); }
  const std::vector<std::size_t>& row_offsets() const noexcept { return row_offsets_; }
  const std::vector<std::size_t>& col_indices() const noexcept { return col_indices_; }
  const std::vector<cplx>& values() const noexcept { return values_; }

  /// out = A * in. Rows are independent, so the loop may run in parallel.
  void apply(const StateVector& in, StateVector& out) const;
  StateVector apply(const StateVector& in) const;

  /// <psi|A|psi> without normalisation.
  cplx expectation(const StateVector& psi) const;
  /// <phi|A|psi>
  cplx matrix_element(const StateVector& phi, const StateVector& psi) const;

  SparseOperator adjoint() const;
  Eigen::MatrixXcd to_dense() const;
  double max_abs() const;

 private:
  std::size_t dim_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<std::size_t> col_indices_;
  std::vector<cplx> values_;
};

/// alpha * A + beta * B
SparseOperator linear_combination(cplx alpha, const SparseOperator& A, cplx beta,
                                  const SparseOperator& B);
SparseOperator product(const SparseOperator& A, const SparseOperator& B);
/// [A, B] = AB - BA
SparseOperator commutator(const SparseOperator& A, const SparseOperator& B);

}  // namespace hubtrack
