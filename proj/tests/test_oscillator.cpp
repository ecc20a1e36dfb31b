#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pathint/canonical_oracle.hpp"
#include "pathint/errors.hpp"
#include "pathint/oscillator.hpp"

using namespace pathint;
using namespace pathint::osc;

namespace {

CMatrix cyclic_shift(int n) {
  CMatrix c = CMatrix::Zero(n, n);
  for (int t = 0; t < n; ++t) c((t + 1) % n, t) = 1.0;
  return c;
}

// Periodic Green function summed in closed form, 0 <= delta <= T.
cplx green_closed(double total, double omega, double delta) {
  return -kI * std::cos(omega * (delta - total / 2.0)) / (2.0 * omega * std::sin(omega * total / 2.0));
}

}  // namespace

TEST_CASE("grid modes") {
  CHECK(grid_modes(4) == std::vector<int>{-2, -1, 0, 1});
  CHECK(grid_modes(5) == std::vector<int>{-2, -1, 0, 1, 2});
  const auto s = ModeSpectrum::symmetric(2.0, 3);
  CHECK(s.modes.size() == 7u);
  CHECK(s.frequency(1) == doctest::Approx(kPi));
}

TEST_CASE("mode product at tau = eps is 1 - exp(-i omega T)") {
  for (int n : {3, 8, 17}) {
    const double eps = 0.13;
    const double w = 1.7;
    const cplx expected = 1.0 - std::exp(-kI * w * (n * eps));
    CHECK(std::abs(mode_product(n, eps, eps, w) - expected) < 1e-13);
  }
}

TEST_CASE("partition product reproduces 1 / (2i sin(omega T / 2))") {
  const double total = kPi / 2.0;
  const cplx v = mode_partition_product(101, total / 101, 1.0);
  CHECK(std::abs(v - cplx(0.0, -1.0 / std::sqrt(2.0))) < 1e-12);
  CHECK(std::abs(partition_closed_form(total, 1.0) - v) < 1e-12);

  const cplx damped{1.0, -0.05};
  CHECK(std::abs(mode_partition_product(64, total / 64, damped) - partition_closed_form(total, damped)) < 1e-12);
}

TEST_CASE("partition product refuses the pole") {
  const double total = 2.0 * kPi;
  CHECK_THROWS_AS(mode_partition_product(10, total / 10, 1.0), SingularConfiguration);
  CHECK_NOTHROW(mode_partition_product(10, total / 10, 1.01));
}

TEST_CASE("mixing matrix limits") {
  const int n = 6;
  const double eps = 0.2, w = 1.3;
  CHECK(mixing_matrix(n, eps, 0.0, w).matrix.cwiseAbs().maxCoeff() < 1e-14);

  const CMatrix expected = CMatrix::Identity(n, n) - std::exp(-kI * w * eps) * cyclic_shift(n);
  CHECK((mixing_matrix(n, eps, eps, w).matrix - expected).norm() < 1e-13);
  CHECK((action_one_body(n, eps, w).matrix - std::exp(-kI * w * eps) * cyclic_shift(n)).norm() < 1e-14);
  CHECK((shift_one_body(n).matrix - cyclic_shift(n)).norm() == 0.0);
  CHECK(std::string(origin_name(mixing_matrix(n, eps, eps, w).origin)) != origin_name(MatrixOrigin::Shift));
}

TEST_CASE("determinant equals the mode product") {
  for (int n : {4, 9, 16}) {
    const double eps = 0.11, tau = 0.07, w = 0.9;
    const cplx det = determinant(mixing_matrix(n, eps, tau, w));
    CHECK(std::abs(det - mode_product(n, eps, tau, w)) < 1e-12);
  }
}

TEST_CASE("reduced mixing matrix has unit determinant and gives the vacuum amplitude") {
  const int n = 12;
  const double eps = 0.25, w = 1.0;
  const auto mbar = reduced(mixing_matrix(n, eps, eps, w));
  CHECK(mbar.matrix.rows() == n - 1);
  CHECK(std::abs(determinant(mbar) - 1.0) < 1e-13);
  const cplx vac = vacuum_persistence_det(n, eps, w);
  CHECK(std::abs(vac - oracle::vacuum_amplitude(w, n * eps, 4)) < 1e-13);
  CHECK(std::abs(vacuum_persistence_det(n, eps, 1e-12) - 1.0) < 1e-10);
}

TEST_CASE("mixing identity holds on a Fock extended space") {
  CHECK(mixing_identity_residual(3, 0.3, 1.0, 4) < 1e-12);
}

TEST_CASE("Green function sums to the periodic closed form") {
  const double total = 1.0, w = 1.5;
  for (double delta : {0.0, 0.2, 0.5, 0.9}) {
    const auto g = green_function(total, w, 100000, delta);
    CHECK(std::abs(g.value - green_closed(total, w, delta)) < 1e-5);
    CHECK(g.change() < 1e-5);
  }
}

TEST_CASE("Green function is even and periodic") {
  const double total = 2.0, w = 0.8;
  for (double delta : {0.1, 0.6, 1.3}) {
    const auto a = green_function(total, w, 500, delta);
    const auto b = green_function(total, w, 500, -delta);
    const auto c = green_function(total, w, 500, total - delta);
    CHECK(std::abs(a.value - b.value) < 1e-14);
    CHECK(std::abs(a.value - c.value) < 1e-12);
  }
}

TEST_CASE("Green function rejects resonance") {
  const double total = 1.0;
  CHECK_THROWS_AS(green_function(total, 2.0 * kPi, 10, 0.0), SingularConfiguration);
  CHECK_THROWS_AS(green_function(total, 2.0 * kPi + 1e-9, 10, 0.0), SingularConfiguration);
  CHECK_THROWS_AS(green_function(total, 0.0, 10, 0.0), SingularConfiguration);
  GreenOptions opt;
  opt.exclude_zero_mode = true;
  CHECK_NOTHROW(green_function(total, 0.0, 10, 0.0, opt));
}

TEST_CASE("zero-frequency Green function") {
  GreenOptions opt;
  opt.exclude_zero_mode = true;
  const double total = 3.0;
  for (double delta : {0.0, 0.75, 2.0}) {
    const auto g = green_function(total, 0.0, 100000, delta, opt);
    CHECK(std::abs(g.value - green_zero_frequency_closed(total, delta)) < 1e-5);
  }
}

TEST_CASE("Green lattice residual is second order in eps") {
  // Asymptotic once eps * omega_K << 1.
  const double r1 = std::abs(green_lattice_residual(1.0, 1.2, 10, 0.3, 0.002));
  const double r2 = std::abs(green_lattice_residual(1.0, 1.2, 10, 0.3, 0.001));
  CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("source Fourier coefficients") {
  const auto src = SourceSpec::from_profile(2.0, 1.0, 1.0, [](double t) { return std::sin(t) + 0.3 * t; });
  for (int n = 0; n < 6; ++n) {
    CHECK(std::abs(src.fourier(-n, 64) - std::conj(src.fourier(n, 64))) < 1e-14);
  }
  // Constant source: only the zero mode survives.
  const auto flat = SourceSpec::from_samples(2.0, 1.0, 1.0, {0.5, 0.5});
  CHECK(std::abs(flat.fourier(0, 8) - 0.5 * std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(flat.fourier(1, 8)) < 1e-14);
  CHECK(flat.slice_values(8) == std::vector<double>(8, 0.5));
  CHECK_THROWS_AS(flat.slice_values(7), InvalidArgument);
}

TEST_CASE("classical action is quadratic in the source") {
  const auto src = SourceSpec::single_mode(2.0, 1.0, 1.0, 0.3, 1);
  const auto twice = SourceSpec::single_mode(2.0, 1.0, 1.0, 0.6, 1);
  const cplx s1 = classical_action_of_source(src, 2000, 64);
  const cplx s2 = classical_action_of_source(twice, 2000, 64);
  CHECK(std::abs(s2 - 4.0 * s1) < 1e-14 * std::abs(s2) + 1e-16);
  CHECK(std::abs(s1.imag()) < 1e-15);
  CHECK(std::abs(classical_action_of_source(SourceSpec::zero(2.0, 1.0, 1.0), 100, 64)) == 0.0);
}

TEST_CASE("zero source gives a unit generating functional") {
  GeneratingFunctionalOptions opt;
  opt.truncation = 10;
  opt.slices = 16;
  const auto r = generating_functional_discrete(SourceSpec::zero(2.0, 1.0, 1.0), opt);
  CHECK(std::abs(r.z - 1.0) < 1e-13);
  CHECK(std::abs(r.target - 1.0) == 0.0);
  CHECK(r.converged);
}

TEST_CASE("source shift displacements and action") {
  const auto src = SourceSpec::single_mode(2.0, 1.0, 1.0, 0.4, 2);
  const auto a = source_shift_transform(src, 50, 64, 0.1);
  const auto b = source_shift_transform(src, 50, 64, 3.0);
  CHECK(a.partial_fraction_residual < 1e-14);
  CHECK(std::abs(a.action - b.action) < 1e-12 * std::abs(a.action));
  for (std::size_t i = 0; i < a.modes.size(); ++i) {
    const double wn = 2.0 * kPi * a.modes[i] / 2.0;
    const cplx d = src.fourier(a.modes[i], 64) / (std::sqrt(2.0 * 1.0 * 0.1) * (wn - 1.0));
    CHECK(std::abs(a.displacements[i] - d) < 1e-14);
  }
  const auto zero = source_shift_transform(SourceSpec::zero(2.0, 1.0, 1.0), 10, 64, 1.0);
  for (const auto& d : zero.displacements) CHECK(d == cplx(0.0));
  CHECK(zero.action == cplx(0.0));
}

TEST_CASE("Feynman propagator closed form and oracle") {
  CHECK(std::abs(feynman_propagator_closed(1.0, kPi) - cplx(-0.5, 0.0)) < 1e-15);
  CHECK(feynman_propagator_closed(1.3, 0.4) == feynman_propagator_closed(1.3, -0.4));
  for (double dt : {0.0, 0.5, -1.2}) {
    CHECK(std::abs(feynman_propagator_oracle(1.0, dt, 40) - feynman_propagator_closed(1.0, dt)) < 1e-12);
  }
  CHECK(std::abs(feynman_propagator_oracle(2.0, 0.3, 40, 3.0) - feynman_propagator_closed(2.0, 0.3)) < 1e-12);
}

TEST_CASE("frequency integral approaches the Feynman propagator") {
  const auto r = frequency_integral_DF(1.0, 0.5, 1e-3, 1e3);
  CHECK(r.tail_bound == doctest::Approx(1.0 / (kPi * 1e3)));
  CHECK(std::abs(r.value - feynman_propagator_closed(1.0, 0.5)) < 1e-3);
  CHECK(r.eta_change < 1e-3);
  const auto neg = frequency_integral_DF(1.0, -0.5, 1e-3, 1e3);
  CHECK(std::abs(neg.value - r.value) < 1e-12);
}
