#include <doctest.h>

#include <numbers>

#include "hubtrack/errors.hpp"
#include "hubtrack/groundstate.hpp"
#include "oracles.hpp"

using namespace hubtrack;

namespace {

SystemParams params(int L, int nu, int nd, double U = 0.0, double t0 = 1.0) {
  SystemParams p;
  p.L = L;
  p.n_up = nu;
  p.n_down = nd;
  p.U = U;
  p.t0 = t0;
  return p;
}

}  // namespace

TEST_CASE("tight-binding energy branches") {
  CHECK(tight_binding_energy(10, 5, 1.0) == doctest::Approx(-6.4721359550).epsilon(1e-11));
  CHECK(tight_binding_energy(4, 2, 1.0) == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(std::abs(tight_binding_energy(7, 7, 1.0)) < 1e-14);
  CHECK(std::abs(tight_binding_energy(8, 8, 1.0)) < 1e-14);
  CHECK(tight_binding_energy(6, 0, 1.0) == 0.0);
  CHECK(tight_binding_energy(2, 1, 2.5) == doctest::Approx(-5.0));
}

TEST_CASE("L=10 half filling at U=0 reproduces the analytic energy") {
  const HubbardModel model(params(10, 5, 5));
  const auto g = ground_state_lanczos(model);
  CHECK(g.energy == doctest::Approx(-12.94427191).epsilon(1e-9));
  CHECK(std::abs(g.energy - 2.0 * tight_binding_energy(10, 5, 1.0)) < 1e-8);
  CHECK(g.residual < 1e-10);
  CHECK(g.psi.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(ground_bond_check(model, g)) < 1e-10);
}

TEST_CASE("two-site ground state matches the dense oracle") {
  const auto ops = oracle::sector_ops(2, 1, 1);
  const auto [E, v] = oracle::ground(ops, 1.0, 0.0);
  const HubbardModel model(params(2, 1, 1));
  const auto g = ground_state(model);
  CHECK(g.energy == doctest::Approx(-4.0).epsilon(1e-14));
  CHECK(std::abs(g.energy - E) < 1e-12);

  const HubbardModel one(params(2, 1, 0));
  const auto g1 = ground_state(one);
  CHECK(one.bond_expectation(g1.psi).K.real() == doctest::Approx(-g1.energy / 2.0).epsilon(1e-14));
}

TEST_CASE("Lanczos agrees with dense diagonalisation") {
  for (double U : {0.0, 1.0, 7.0}) {
    const HubbardModel model(params(6, 3, 3, U));
    const auto dense = ground_state_dense(model);
    const auto lanczos = ground_state_lanczos(model);
    CHECK(std::abs(dense.energy - lanczos.energy) < 1e-10);
    CHECK(std::abs(std::abs(dense.psi.dot(lanczos.psi)) - 1.0) < 1e-9);
  }
  for (int L : {2, 4}) {
    const auto ops = oracle::sector_ops(L, L / 2, L / 2);
    for (double U : {0.5, 4.0}) {
      const HubbardModel model(params(L, L / 2, L / 2, U));
      CHECK(std::abs(ground_state_lanczos(model).energy - oracle::ground(ops, 1.0, U).first) < 1e-10);
    }
  }
}

TEST_CASE("U=0 ground energies match the analytic sum for every filling up to L=8") {
  for (int L = 2; L <= 8; ++L) {
    for (int nu = 0; nu <= L; ++nu) {
      for (int nd = 0; nd <= nu; ++nd) {
        const HubbardModel model(params(L, nu, nd));
        const auto g = ground_state(model);
        const double analytic = tight_binding_energy(L, nu, 1.0) + tight_binding_energy(L, nd, 1.0);
        INFO("L=" << L << " nu=" << nu << " nd=" << nd);
        CHECK(std::abs(g.energy - analytic) < 1e-8);
        CHECK(std::abs(model.bond_expectation(g.psi).K.real() + g.energy / 2.0) < 1e-8);
        if (nu > 0 && nu < L) CHECK(model.bond_expectation(g.psi).R > 0.0);
      }
    }
  }
}

TEST_CASE("ground energy rises with U and falls with t0") {
  const auto ops = oracle::sector_ops(4, 2, 2);
  double prev = -1e300;
  for (double U : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 64.0, 1000.0}) {
    const HubbardModel model(params(4, 2, 2, U));
    const double E = ground_state(model).energy;
    CHECK(std::abs(E - oracle::ground(ops, 1.0, U).first) < 1e-10);
    CHECK(E > prev);
    prev = E;
  }
  CHECK(prev < 0.0);
  CHECK(prev > -0.05);

  prev = 1e300;
  for (double t0 : {0.25, 0.5, 1.0, 2.0}) {
    const HubbardModel model(params(4, 2, 2, 3.0, t0));
    const double E = ground_state(model).energy;
    CHECK(E < prev);
    prev = E;
  }
}

TEST_CASE("one-dimensional sectors") {
  const HubbardModel model(params(4, 4, 4, 2.5));
  const auto g = ground_state(model);
  CHECK(model.dim() == 1);
  CHECK(g.energy == doctest::Approx(2.5 * 4));
  const HubbardModel empty(params(3, 0, 3, 2.5));
  CHECK(ground_state(empty).energy == doctest::Approx(0.0));
}

TEST_CASE("seeded solver output is reproducible") {
  const HubbardModel model(params(8, 4, 4, 1.0));
  GroundStateOptions opts;
  opts.dense_limit = 0;
  const auto a = ground_state(model, opts);
  const auto b = ground_state(model, opts);
  CHECK(a.energy == b.energy);
  CHECK((a.psi - b.psi).norm() == 0.0);
  CHECK(a.residual < opts.tol);
}

TEST_CASE("ground_bond_check guards its preconditions") {
  const HubbardModel interacting(params(4, 2, 2, 1.0));
  const auto g = ground_state(interacting);
  CHECK_THROWS_AS(ground_bond_check(interacting, g), ParameterError);

  const HubbardModel free(params(4, 2, 2));
  auto wrong = ground_state(free);
  wrong.energy += 0.1;
  CHECK_THROWS_AS(ground_bond_check(free, wrong), ConsistencyError);
}

TEST_CASE("unconverged Lanczos raises a solver error with its residual") {
  const HubbardModel model(params(8, 4, 4, 3.0));
  GroundStateOptions opts;
  opts.tol = 1e-14;
  opts.krylov_size = 4;
  opts.max_restarts = 1;
  try {
    ground_state_lanczos(model, opts);
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    CHECK(e.residual() > opts.tol);
  }
}
