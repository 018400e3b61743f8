#include "hubtrack/sparse.hpp"

#include <algorithm>
#include <map>

#include "hubtrack/errors.hpp"

namespace hubtrack {

SparseOperator SparseOperator::from_triplets(std::size_t dim, std::vector<Triplet> entries) {
  for (const auto& t : entries) {
    if (t.row >= dim || t.col >= dim) throw ParameterError("triplet index out of range");
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Triplet& x, const Triplet& y) {
    return x.row != y.row ? x.row < y.row : x.col < y.col;
  });

  SparseOperator op;
  op.dim_ = dim;
  op.row_offsets_.assign(dim + 1, 0);
  op.col_indices_.reserve(entries.size());
  op.values_.reserve(entries.size());

  std::size_t i = 0;
  while (i < entries.size()) {
    const std::size_t row = entries[i].row;
    const std::size_t col = entries[i].col;
    cplx sum = 0.0;
    while (i < entries.size() && entries[i].row == row && entries[i].col == col) {
      sum += entries[i].value;
      ++i;
    }
    if (sum != cplx{0.0, 0.0}) {
      op.col_indices_.push_back(col);
      op.values_.push_back(sum);
      ++op.row_offsets_[row + 1];
    }
  }
  for (std::size_t r = 0; r < dim; ++r) op.row_offsets_[r + 1] += op.row_offsets_[r];
  return op;
}

SparseOperator SparseOperator::diagonal(std::span<const double> diag) {
  std::vector<Triplet> t;
  t.reserve(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) t.push_back({i, i, cplx{diag[i], 0.0}});
  return from_triplets(diag.size(), std::move(t));
}

SparseOperator SparseOperator::identity(std::size_t dim) {
  std::vector<double> ones(dim, 1.0);
  return diagonal(ones);
}

void SparseOperator::apply(const StateVector& in, StateVector& out) const {
  if (static_cast<std::size_t>(in.size()) != dim_) {
    throw ParameterError("state dimension does not match operator");
  }
  out.resize(in.size());
  const auto n = static_cast<std::ptrdiff_t>(dim_);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    cplx acc = 0.0;
    for (std::size_t p = row_offsets_[r]; p < row_offsets_[r + 1]; ++p) {
      acc += values_[p] * in[static_cast<Eigen::Index>(col_indices_[p])];
    }
    out[r] = acc;
  }
}

StateVector SparseOperator::apply(const StateVector& in) const {
  StateVector out;
  apply(in, out);
  return out;
}

cplx SparseOperator::matrix_element(const StateVector& phi, const StateVector& psi) const {
  if (static_cast<std::size_t>(psi.size()) != dim_ ||
      static_cast<std::size_t>(phi.size()) != dim_) {
    throw ParameterError("state dimension does not match operator");
  }
  cplx total = 0.0;
  for (std::size_t r = 0; r < dim_; ++r) {
    cplx acc = 0.0;
    for (std::size_t p = row_offsets_[r]; p < row_offsets_[r + 1]; ++p) {
      acc += values_[p] * psi[static_cast<Eigen::Index>(col_indices_[p])];
    }
    total += std::conj(phi[static_cast<Eigen::Index>(r)]) * acc;
  }
  return total;
}

cplx SparseOperator::expectation(const StateVector& psi) const {
  return matrix_element(psi, psi);
}

SparseOperator SparseOperator::adjoint() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for (std::size_t r = 0; r < dim_; ++r) {
    for (std::size_t p = row_offsets_[r]; p < row_offsets_[r + 1]; ++p) {
      t.push_back({col_indices_[p], r, std::conj(values_[p])});
    }
  }
  return from_triplets(dim_, std::move(t));
}

Eigen::MatrixXcd SparseOperator::to_dense() const {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim_),
                                              static_cast<Eigen::Index>(dim_));
  for (std::size_t r = 0; r < dim_; ++r) {
    for (std::size_t p = row_offsets_[r]; p < row_offsets_[r + 1]; ++p) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col_indices_[p])) += values_[p];
    }
  }
  return m;
}

double SparseOperator::max_abs() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v));
  return m;
}

SparseOperator linear_combination(cplx alpha, const SparseOperator& A, cplx beta,
                                  const SparseOperator& B) {
  if (A.dim() != B.dim()) throw ParameterError("operator dimensions differ");
  std::vector<Triplet> t;
  t.reserve(A.nnz() + B.nnz());
  auto push = [&t](cplx s, const SparseOperator& M) {
    for (std::size_t r = 0; r < M.dim(); ++r) {
      for (std::size_t p = M.row_offsets()[r]; p < M.row_offsets()[r + 1]; ++p) {
        t.push_back({r, M.col_indices()[p], s * M.values()[p]});
      }
    }
  };
  push(alpha, A);
  push(beta, B);
  return SparseOperator::from_triplets(A.dim(), std::move(t));
}

SparseOperator product(const SparseOperator& A, const SparseOperator& B) {
  if (A.dim() != B.dim()) throw ParameterError("operator dimensions differ");
  std::vector<Triplet> t;
  std::map<std::size_t, cplx> row;
  for (std::size_t r = 0; r < A.dim(); ++r) {
    row.clear();
    for (std::size_t p = A.row_offsets()[r]; p < A.row_offsets()[r + 1]; ++p) {
      const std::size_t k = A.col_indices()[p];
      for (std::size_t q = B.row_offsets()[k]; q < B.row_offsets()[k + 1]; ++q) {
        row[B.col_indices()[q]] += A.values()[p] * B.values()[q];
      }
    }
    for (const auto& [c, v] : row) t.push_back({r, c, v});
  }
  return SparseOperator::from_triplets(A.dim(), std::move(t));
}

SparseOperator commutator(const SparseOperator& A, const SparseOperator& B) {
  return linear_combination(1.0, product(A, B), -1.0, product(B, A));
}

}  // namespace hubtrack
