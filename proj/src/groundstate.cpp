#include "hubtrack/groundstate.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "hubtrack/errors.hpp"

namespace hubtrack {

namespace {

double residual_norm(const HubbardModel& model, const StateVector& psi, double energy) {
  StateVector h;
  model.apply_hamiltonian(psi, cplx{1.0, 0.0}, energy, h);
  return h.norm();
}

StateVector seeded_start(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  StateVector v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = cplx{normal(rng), 0.0};
  v.normalize();
  return v;
}

}  // namespace

GroundStateResult ground_state_dense(const HubbardModel& model) {
  if (model.dim() > 6000) throw ParameterError("sector too large for dense diagonalisation");
  // H(0) = -t0 (K + K^T) + U D is real symmetric; a real solver keeps the ground vector real
  const Eigen::MatrixXd K = model.bond_operator().to_dense().real();
  Eigen::MatrixXd H = -model.params().t0 * (K + K.transpose());
  for (std::size_t s = 0; s < model.dim(); ++s) {
    const auto i = static_cast<Eigen::Index>(s);
    H(i, i) += model.params().U * model.doublons()[s];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H);
  if (solver.info() != Eigen::Success) throw SolverError("dense eigensolver failed", NAN);

  GroundStateResult r;
  r.psi = solver.eigenvectors().col(0).cast<cplx>();
  r.psi.normalize();
  r.energy = model.energy(r.psi, 0.0);
  r.residual = residual_norm(model, r.psi, r.energy);
  return r;
}

GroundStateResult ground_state_lanczos(const HubbardModel& model, const GroundStateOptions& opts) {
  const std::size_t dim = model.dim();
  const int m = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(opts.krylov_size), dim));
  StateVector x = seeded_start(dim, opts.seed);

  std::vector<StateVector> V;
  V.reserve(static_cast<std::size_t>(m) + 1);
  StateVector w;
  double energy = model.energy(x, 0.0);
  double residual = residual_norm(model, x, energy);

  for (int restart = 0; restart < opts.max_restarts && residual > opts.tol; ++restart) {
    V.clear();
    V.push_back(x);
    std::vector<double> alpha, beta;
    for (int j = 0; j < m; ++j) {
      model.apply_hamiltonian(V.back(), cplx{1.0, 0.0}, 0.0, w);
      const double a = V.back().dot(w).real();
      alpha.push_back(a);
      // two passes of classical Gram-Schmidt against the whole window
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& v : V) w -= v.dot(w) * v;
      }
      const double b = w.norm();
      if (j + 1 == m || b < 1e-13 * std::max(1.0, std::abs(a))) break;
      beta.push_back(b);
      V.push_back(w / b);
    }

    const auto k = static_cast<Eigen::Index>(alpha.size());
    Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), k);
    Eigen::VectorXd sub = Eigen::VectorXd::Zero(std::max<Eigen::Index>(k - 1, 0));
    for (Eigen::Index i = 0; i + 1 < k; ++i) sub[i] = beta[static_cast<std::size_t>(i)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(diag, sub);

    const Eigen::VectorXd s = tri.eigenvectors().col(0);
    x.setZero();
    for (Eigen::Index i = 0; i < k; ++i) x += s[i] * V[static_cast<std::size_t>(i)];
    x.normalize();
    energy = model.energy(x, 0.0);
    residual = residual_norm(model, x, energy);
  }

  if (residual > opts.tol) {
    std::ostringstream msg;
    msg << "Lanczos did not converge: residual " << residual << " > tol " << opts.tol;
    throw SolverError(msg.str(), residual);
  }
  return {energy, x, residual};
}

GroundStateResult ground_state(const HubbardModel& model, const GroundStateOptions& opts) {
  if (model.dim() <= opts.dense_limit) {
    auto r = ground_state_dense(model);
    if (r.residual > opts.tol) {
      std::ostringstream msg;
      msg << "dense ground state residual " << r.residual << " > tol " << opts.tol;
      throw SolverError(msg.str(), r.residual);
    }
    return r;
  }
  return ground_state_lanczos(model, opts);
}

double tight_binding_energy(int L, int n_sigma, double t0) {
  if (L < 1 || n_sigma < 0 || n_sigma > L) throw ParameterError("invalid filling");
  if (n_sigma == 0) return 0.0;
  auto omega = [L](int k) { return 2.0 * std::numbers::pi * k / L; };
  double sum = 1.0;
  if (n_sigma % 2 == 1) {
    for (int k = 1; k <= (n_sigma - 1) / 2; ++k) sum += 2.0 * std::cos(omega(k));
  } else {
    for (int k = 1; k <= n_sigma / 2 - 1; ++k) sum += 2.0 * std::cos(omega(k));
    sum += std::cos(std::numbers::pi * n_sigma / L);
  }
  return -2.0 * t0 * sum;
}

double ground_bond_check(const HubbardModel& model, const GroundStateResult& result, double tol) {
  if (model.params().U != 0.0) throw ParameterError("ground_bond_check requires U = 0");
  const auto bond = model.bond_expectation(result.psi);
  const double expected = -result.energy / (2.0 * model.params().t0);
  if (std::abs(bond.K.real() - expected) > tol) {
    std::ostringstream msg;
    msg << "Re K(psi_g) = " << bond.K.real() << " but -E_g/(2 t0) = " << expected;
    throw ConsistencyError(msg.str());
  }
  return bond.K.imag();
}

}  // namespace hubtrack
