#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "pathint/canonical_oracle.hpp"
#include "pathint/errors.hpp"

using namespace pathint;
using namespace pathint::oracle;

namespace {

// exp(-i H t) straight from the eigendecomposition, independent of propagator_step.
CMatrix exact_exp(const CMatrix& h, cplx t) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  CVector phase(h.rows());
  for (int i = 0; i < h.rows(); ++i) phase[i] = std::exp(-kI * t * es.eigenvalues()[i]);
  return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

TEST_CASE("constant schedule evolves by the matrix exponential") {
  const auto s = SliceSpace::fock(5, 1.0, 1.0);
  std::mt19937_64 rng(4);
  const auto h = random_hermitian(s, rng);
  const auto sched = EvolutionSchedule::constant(h, 2.0);
  CHECK((evolve(sched, 1.3).matrix() - exact_exp(h.matrix(), 1.3)).norm() < 1e-12);
  CHECK((evolve_between(sched, 0.4, 1.9).matrix() - exact_exp(h.matrix(), 1.5)).norm() < 1e-12);
  CHECK((evolve(sched, 0.0).matrix() - CMatrix::Identity(5, 5)).norm() < 1e-14);
}

TEST_CASE("piecewise schedule composes segments in order") {
  const auto s = SliceSpace::fock(4, 1.0, 1.0);
  std::mt19937_64 rng(6);
  const auto h1 = random_hermitian(s, rng);
  const auto h2 = random_hermitian(s, rng);
  const EvolutionSchedule sched({{h1, 0.5}, {h2, 0.7}});
  CHECK(sched.total() == doctest::Approx(1.2));
  const CMatrix expected = exact_exp(h2.matrix(), 0.4) * exact_exp(h1.matrix(), 0.2);
  CHECK((evolve_between(sched, 0.3, 0.9).matrix() - expected).norm() < 1e-12);
}

TEST_CASE("contour tilt damps the evolution") {
  const auto s = SliceSpace::fock(4, 1.0, 1.0);
  const auto h = harmonic_hamiltonian(s);
  const cplx c{1.0, -0.2};
  const auto sched = EvolutionSchedule::constant(h, 1.0, c);
  const auto u = evolve(sched, 1.0);
  for (int n = 0; n < 4; ++n) CHECK(std::abs(u.matrix()(n, n) - std::exp(-kI * c * (n + 0.5))) < 1e-13);
}

TEST_CASE("schedule inputs are validated") {
  const auto h = harmonic_hamiltonian(SliceSpace::fock(3, 1, 1));
  CHECK_THROWS_AS(EvolutionSchedule({}), InvalidArgument);
  CHECK_THROWS_AS(EvolutionSchedule({{h, -1.0}}), InvalidArgument);
  const auto sched = EvolutionSchedule::constant(h, 1.0);
  CHECK_THROWS_AS(evolve_between(sched, 0.8, 0.2), InvalidArgument);
  CHECK_THROWS_AS(evolve(sched, 1.5), InvalidArgument);
}

TEST_CASE("time ordering is applied internally") {
  const auto s = SliceSpace::fock(5, 1.0, 1.0);
  std::mt19937_64 rng(8);
  const auto h = random_hermitian(s, rng);
  const auto q = position_operator(s);
  const auto p = momentum_operator(s);
  const auto sched = EvolutionSchedule::constant(h, 1.0);
  const std::vector<TimedOperator> forward{{0.2, q}, {0.7, p}};
  const std::vector<TimedOperator> backward{{0.7, p}, {0.2, q}};
  const cplx a = time_ordered_correlator(sched, forward, 1, 3);
  CHECK(a == time_ordered_correlator(sched, backward, 1, 3));
  const CMatrix full = exact_exp(h.matrix(), 0.3) * p.matrix() * exact_exp(h.matrix(), 0.5) * q.matrix() *
                       exact_exp(h.matrix(), 0.2);
  CHECK(std::abs(a - full(3, 1)) < 1e-12);

  const std::vector<TimedOperator> clash{{0.5, q}, {0.5, p}};
  CHECK_THROWS_AS(time_ordered_correlator(sched, clash, 0, 0), InvalidArgument);
  CHECK_THROWS_AS(time_ordered_correlator(sched, forward, 5, 0), InvalidArgument);
}

TEST_CASE("empty correlator is a propagator element") {
  const auto s = SliceSpace::fock(4, 1.0, 1.0);
  std::mt19937_64 rng(1);
  const auto h = random_hermitian(s, rng);
  const auto sched = EvolutionSchedule::constant(h, 0.8);
  const CMatrix u = exact_exp(h.matrix(), 0.8);
  CHECK(std::abs(time_ordered_correlator(sched, {}, 2, 0) - u(0, 2)) < 1e-13);
}

TEST_CASE("harmonic vacuum and thermal values") {
  CHECK(std::abs(vacuum_amplitude(1.0, kPi, 8) - std::exp(-kI * kPi / 2.0)) < 1e-13);
  CHECK(std::abs(vacuum_amplitude(2.5, 0.7, 4, 3.0) - std::exp(-kI * 2.5 * 0.35)) < 1e-13);

  const auto h = harmonic_hamiltonian(SliceSpace::fock(80, 1.0, 1.0));
  const double beta = 1.5;
  CHECK(std::abs(thermal_partition(h, beta) - 1.0 / (2.0 * std::sinh(beta / 2.0))) < 1e-13);
  CHECK(std::abs(thermal_correlator(h, beta, {}) - 1.0) < 1e-13);

  // <q(theta) q(0)>_beta = cosh(omega(beta/2 - theta)) / (2 omega sinh(omega beta / 2)) for m = omega = 1.
  const auto q = position_operator(h.space());
  const std::vector<TimedOperator> ops{{0.0, q}, {0.4, q}};
  const cplx g = thermal_correlator(h, beta, ops);
  CHECK(std::abs(g - std::cosh(beta / 2.0 - 0.4) / (2.0 * std::sinh(beta / 2.0))) < 1e-12);
}
