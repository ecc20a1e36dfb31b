#include "pathint/oscillator.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <sstream>

#include "pathint/canonical_oracle.hpp"
#include "pathint/dense.hpp"
#include "pathint/errors.hpp"
#include "pathint/extended_space.hpp"
#include "pathint/slice_space.hpp"

namespace pathint::osc {
namespace {

double mode_frequency(double total_time, int n) { return 2.0 * kPi * n / total_time; }

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream msg;
    msg << what << " must be positive and finite (got " << v << ")";
    throw InvalidArgument(msg.str());
  }
}

void require_slices(int slices) {
  if (slices < 1) throw InvalidArgument("number of slices must be >= 1");
}

void check_resonance(double total_time, double omega, int max_mode, double radius, bool skip_zero) {
  for (int n = skip_zero ? 1 : 0; n <= max_mode; ++n) {
    const double wn = mode_frequency(total_time, n);
    if (std::abs(std::abs(omega) - wn) < radius) {
      std::ostringstream msg;
      msg << "omega = " << omega << " is within " << radius << " of mode frequency omega_" << n << " = " << wn;
      throw SingularConfiguration(msg.str());
    }
  }
}

cplx green_partial(double total_time, double omega, int cutoff, double delta, bool exclude_zero) {
  const double w2 = omega * omega;
  cplx sum{};
  if (!exclude_zero) sum += kI / (total_time * (0.0 - w2));
  // (+n, -n) pair: i [e^{-i w_n d} + e^{i w_n d}] / [T (w_n^2 - w^2)]
  for (int n = 1; n <= cutoff; ++n) {
    const double wn = mode_frequency(total_time, n);
    sum += kI * (2.0 * std::cos(wn * delta)) / (total_time * (wn * wn - w2));
  }
  return sum;
}

cplx truncated_delta(double total_time, int cutoff, double delta) {
  double sum = 1.0;
  for (int n = 1; n <= cutoff; ++n) sum += 2.0 * std::cos(mode_frequency(total_time, n) * delta);
  return sum / total_time;
}

SliceOperator driven_hamiltonian(const SliceSpace& space, double j) {
  const SliceOperator h0 = harmonic_hamiltonian(space);
  const SliceOperator q = position_operator(space);
  return SliceOperator(space, h0.matrix() - std::sqrt(space.mass()) * j * q.matrix(), "H[j]");
}

cplx trace_ratio(const SourceSpec& src, int truncation, int slices, cplx contour) {
  const SliceSpace space = SliceSpace::fock(truncation, src.mass, src.omega);
  const auto values = src.slice_values(slices);
  const double eps = src.total_time / slices;
  std::vector<oracle::Segment> segments;
  segments.reserve(slices);
  for (double j : values) segments.push_back({driven_hamiltonian(space, j), eps});
  const oracle::EvolutionSchedule driven(std::move(segments), contour);
  const cplx num = oracle::evolve(driven, src.total_time).matrix().trace();
  const cplx den = propagator_step(harmonic_hamiltonian(space), contour * src.total_time).matrix().trace();
  return num / den;
}

cplx zoh_fourier(const std::vector<double>& v, double total_time, int n) {
  const int slices = static_cast<int>(v.size());
  const double eps = total_time / slices;
  const double norm = 1.0 / std::sqrt(total_time);
  if (n == 0) {
    double s = 0.0;
    for (double x : v) s += x;
    return eps * s * norm;
  }
  const double wn = mode_frequency(total_time, n);
  const cplx window = (std::exp(kI * wn * eps) - 1.0) / (kI * wn);
  const long long nm = ((static_cast<long long>(n) % slices) + slices) % slices;
  cplx s{};
  for (int t = 0; t < slices; ++t) s += v[t] * std::polar(1.0, 2.0 * kPi * static_cast<double>(nm * t % slices) / slices);
  return s * window * norm;
}

}  // namespace

// ---------------------------------------------------------------------------
// Modes

std::vector<int> grid_modes(int slices) {
  require_slices(slices);
  std::vector<int> modes;
  modes.reserve(slices);
  for (int n = -(slices / 2); n <= (slices - 1) / 2; ++n) modes.push_back(n);
  return modes;
}

ModeSpectrum ModeSpectrum::symmetric(double total_time, int cutoff) {
  require_positive(total_time, "T");
  if (cutoff < 0) throw InvalidArgument("mode cutoff must be >= 0");
  ModeSpectrum s{total_time, {}};
  for (int n = -cutoff; n <= cutoff; ++n) s.modes.push_back(n);
  return s;
}

ModeSpectrum ModeSpectrum::grid(double total_time, int slices) {
  require_positive(total_time, "T");
  return ModeSpectrum{total_time, grid_modes(slices)};
}

double ModeSpectrum::frequency(int n) const { return mode_frequency(total_time, n); }

cplx mode_product(int slices, double eps, double tau, cplx omega) {
  require_positive(eps, "eps");
  const double total = slices * eps;
  cplx prod = 1.0;
  for (int n : grid_modes(slices)) prod *= 1.0 - std::exp(kI * tau * (mode_frequency(total, n) - omega));
  return prod;
}

cplx partition_closed_form(double total_time, cplx omega) {
  return 1.0 / (2.0 * kI * std::sin(omega * total_time / 2.0));
}

cplx mode_partition_product(int slices, double eps, cplx omega, double pole_guard) {
  require_slices(slices);
  require_positive(eps, "eps");
  const double total = slices * eps;
  if (std::abs(std::sin(omega * total / 2.0)) < pole_guard) {
    std::ostringstream msg;
    msg << "omega T = " << omega * total << " sits on a pole 2 pi k (|sin(omega T/2)| < " << pole_guard << ")";
    throw SingularConfiguration(msg.str());
  }
  return std::exp(-kI * omega * total / 2.0) / mode_product(slices, eps, eps, omega);
}

// ---------------------------------------------------------------------------
// One-body matrices

const char* origin_name(MatrixOrigin origin) {
  switch (origin) {
    case MatrixOrigin::Shift:
      return "shift";
    case MatrixOrigin::Action:
      return "action";
    case MatrixOrigin::Mixing:
      return "mixing";
    case MatrixOrigin::ReducedMixing:
      return "reduced-mixing";
  }
  return "unknown";
}

OneBodyMatrix shift_one_body(int slices) {
  require_slices(slices);
  CMatrix c = CMatrix::Zero(slices, slices);
  for (int t = 0; t < slices; ++t) c((t + 1) % slices, t) = 1.0;
  return {c, MatrixOrigin::Shift};
}

OneBodyMatrix action_one_body(int slices, double eps, double omega) {
  return {std::exp(-kI * omega * eps) * shift_one_body(slices).matrix, MatrixOrigin::Action};
}

OneBodyMatrix mixing_matrix(int slices, double eps, double tau, double omega) {
  require_slices(slices);
  require_positive(eps, "eps");
  const double total = slices * eps;
  const auto modes = grid_modes(slices);
  CMatrix f(slices, slices);
  CVector phase(slices);
  for (int r = 0; r < slices; ++r) {
    const double wn = mode_frequency(total, modes[r]);
    phase(r) = std::exp(kI * tau * (wn - omega));
    for (int t = 0; t < slices; ++t) f(r, t) = std::polar(1.0 / std::sqrt(slices), 2.0 * kPi * modes[r] * t / slices);
  }
  CMatrix m = CMatrix::Identity(slices, slices) - f.adjoint() * phase.asDiagonal() * f;
  return {m, MatrixOrigin::Mixing};
}

OneBodyMatrix reduced(const OneBodyMatrix& m) {
  const auto n = m.matrix.rows();
  if (n < 2) throw InvalidArgument("reduced: need at least a 2 x 2 matrix");
  return {m.matrix.bottomRightCorner(n - 1, n - 1), MatrixOrigin::ReducedMixing};
}

cplx determinant(const OneBodyMatrix& m) { return m.matrix.partialPivLu().determinant(); }

cplx vacuum_persistence_det(int slices, double eps, double omega) {
  if (slices < 2) throw InvalidArgument("vacuum_persistence_det: need N >= 2");
  const cplx det = determinant(reduced(mixing_matrix(slices, eps, eps, omega)));
  if (std::abs(det) < 1e-14) throw SingularConfiguration("vacuum_persistence_det: reduced mixing matrix is singular");
  return std::exp(-kI * omega * (slices * eps) / 2.0) / det;
}

double mixing_identity_residual(int slices, double eps, double omega, int truncation) {
  const SliceSpace space = SliceSpace::fock(truncation, 1.0, omega);
  const ActionSpec spec = ActionSpec::time_independent(harmonic_hamiltonian(space), slices, eps);
  const CMatrix es = dense::action(spec);
  const CMatrix es_inv = es.adjoint();
  const CMatrix m = mixing_matrix(slices, eps, eps, omega).matrix;
  const CMatrix adag = creation_operator(space).matrix();
  std::vector<CMatrix> lifted;
  for (int t = 0; t < slices; ++t) lifted.push_back(dense::embed(adag, t, slices));
  double worst = 0.0;
  for (int t = 0; t < slices; ++t) {
    CMatrix r = lifted[t] - es * lifted[t] * es_inv;
    for (int tp = 0; tp < slices; ++tp) r -= m(tp, t) * lifted[tp];
    worst = std::max(worst, r.norm());
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Green function

SeriesValue green_function(double total_time, double omega, int cutoff, double delta, const GreenOptions& opt) {
  require_positive(total_time, "T");
  if (cutoff < 0) throw InvalidArgument("green_function: cutoff must be >= 0");
  check_resonance(total_time, omega, 2 * cutoff, opt.resonance_radius, opt.exclude_zero_mode);
  return {green_partial(total_time, omega, cutoff, delta, opt.exclude_zero_mode),
          green_partial(total_time, omega, 2 * cutoff, delta, opt.exclude_zero_mode)};
}

cplx green_lattice_residual(double total_time, double omega, int cutoff, double delta, double eps) {
  require_positive(eps, "eps");
  check_resonance(total_time, omega, cutoff, kResonanceRadius, false);
  const cplx g0 = green_partial(total_time, omega, cutoff, delta, false);
  const cplx gp = green_partial(total_time, omega, cutoff, delta + eps, false);
  const cplx gm = green_partial(total_time, omega, cutoff, delta - eps, false);
  const cplx d2 = (gp - 2.0 * g0 + gm) / (eps * eps);
  return d2 + omega * omega * g0 + kI * truncated_delta(total_time, cutoff, delta);
}

cplx green_zero_frequency_closed(double total_time, double delta) {
  const double x = delta / total_time;
  if (x < 0.0 || x > 1.0) throw InvalidArgument("green_zero_frequency_closed: need 0 <= delta <= T");
  return kI * total_time / 2.0 * (x * x - x + 1.0 / 6.0);
}

// ---------------------------------------------------------------------------
// Sources

SourceSpec SourceSpec::from_profile(double total_time, double mass, double omega, std::function<double(double)> j) {
  require_positive(total_time, "T");
  require_positive(mass, "mass");
  SourceSpec s;
  s.total_time = total_time;
  s.mass = mass;
  s.omega = omega;
  s.profile = std::move(j);
  return s;
}

SourceSpec SourceSpec::from_samples(double total_time, double mass, double omega, std::vector<double> samples) {
  require_positive(total_time, "T");
  require_positive(mass, "mass");
  if (samples.empty()) throw InvalidArgument("SourceSpec: empty sample list");
  for (double v : samples)
    if (!std::isfinite(v)) throw InvalidArgument("SourceSpec: non-finite source sample");
  SourceSpec s;
  s.total_time = total_time;
  s.mass = mass;
  s.omega = omega;
  s.samples = std::move(samples);
  return s;
}

SourceSpec SourceSpec::single_mode(double total_time, double mass, double omega, double amplitude, int mode) {
  const double wn = mode_frequency(total_time, mode);
  return from_profile(total_time, mass, omega, [=](double t) { return amplitude * std::cos(wn * t); });
}

SourceSpec SourceSpec::zero(double total_time, double mass, double omega) {
  return from_profile(total_time, mass, omega, [](double) { return 0.0; });
}

std::vector<double> SourceSpec::slice_values(int slices) const {
  require_slices(slices);
  std::vector<double> v(slices);
  if (profile) {
    const double eps = total_time / slices;
    for (int t = 0; t < slices; ++t) v[t] = profile((t + 0.5) * eps);
    return v;
  }
  const int k = static_cast<int>(samples.size());
  if (k == 0 || slices % k != 0) {
    std::ostringstream msg;
    msg << "SourceSpec: " << k << " samples cannot be refined onto " << slices << " slices";
    throw InvalidArgument(msg.str());
  }
  const int rep = slices / k;
  for (int t = 0; t < slices; ++t) v[t] = samples[t / rep];
  return v;
}

cplx SourceSpec::fourier(int n, int slices) const {
  return zoh_fourier(slice_values(slices), total_time, n);
}

cplx classical_action_of_source(const SourceSpec& src, int cutoff, int slices, cplx contour) {
  if (cutoff < 0) throw InvalidArgument("classical_action_of_source: cutoff must be >= 0");
  if (contour.imag() == 0.0)
    check_resonance(src.total_time, src.omega, cutoff, kResonanceRadius, false);
  const auto v = src.slice_values(slices);
  const cplx c2w2 = contour * contour * src.omega * src.omega;
  const cplx c3 = contour * contour * contour;
  const cplx j0 = zoh_fourier(v, src.total_time, 0);
  cplx sum = c3 * j0 * j0 / c2w2;
  for (int n = 1; n <= cutoff; ++n) {
    const double wn = mode_frequency(src.total_time, n);
    sum += 2.0 * c3 * zoh_fourier(v, src.total_time, -n) * zoh_fourier(v, src.total_time, n) / (c2w2 - wn * wn);
  }
  return 0.5 * sum;
}

GeneratingFunctionalResult generating_functional_discrete(const SourceSpec& src,
                                                          const GeneratingFunctionalOptions& opt) {
  require_positive(opt.eta, "eta");
  if (opt.truncation < 2 || opt.slices < 1 || opt.mode_factor < 1)
    throw InvalidArgument("generating_functional_discrete: need d >= 2, N >= 1, mode_factor >= 1");
  if (std::abs(std::sin(src.omega * src.total_time / 2.0)) < kPoleGuard)
    throw SingularConfiguration("generating_functional_discrete: omega T is a multiple of 2 pi");
  const cplx contour(1.0, -opt.eta);

  GeneratingFunctionalResult r{};
  r.z = trace_ratio(src, opt.truncation, opt.slices, contour);
  r.z_truncation = trace_ratio(src, 2 * opt.truncation, opt.slices, contour);
  r.z_slices = trace_ratio(src, opt.truncation, 2 * opt.slices, contour);
  r.truncation_change = std::abs(r.z - r.z_truncation);
  r.slicing_change = std::abs(r.z - r.z_slices);
  r.converged = r.truncation_change < opt.sweep_tolerance && r.slicing_change < opt.sweep_tolerance;
  const int cutoff = opt.mode_factor * opt.slices;
  r.action = classical_action_of_source(src, cutoff, opt.slices, contour);
  r.target = std::exp(kI * r.action);
  r.relative_error = std::abs(r.z - r.target) / std::abs(r.target);
  r.real_time_action = classical_action_of_source(src, cutoff, opt.slices, 1.0).real();
  return r;
}

SourceShiftTable source_shift_transform(const SourceSpec& src, int cutoff, int slices, double tau) {
  require_positive(tau, "tau");
  require_positive(src.omega, "omega");
  check_resonance(src.total_time, src.omega, cutoff, kResonanceRadius, false);
  SourceShiftTable table{tau, {}, {}, 0.0, 0.0};
  const double w = src.omega;
  const double scale = std::sqrt(2.0 * w * tau);
  const auto v = src.slice_values(slices);
  cplx action{};
  for (int n = -cutoff; n <= cutoff; ++n) {
    const double wn = mode_frequency(src.total_time, n);
    const cplx d = zoh_fourier(v, src.total_time, n) / (scale * (wn - w));
    table.modes.push_back(n);
    table.displacements.push_back(d);
    action += -tau * (wn - w) * std::norm(d);
    const double lhs = 1.0 / (wn - w) - 1.0 / (wn + w);
    const double rhs = 2.0 * w / (wn * wn - w * w);
    const double scale_pf = std::max(std::abs(1.0 / (wn - w)), std::abs(1.0 / (wn + w)));
    table.partial_fraction_residual = std::max(table.partial_fraction_residual, std::abs(lhs - rhs) / scale_pf);
  }
  table.action = action;
  return table;
}

// ---------------------------------------------------------------------------
// Feynman propagator

cplx feynman_propagator_closed(double omega, double dt) {
  require_positive(omega, "omega");
  return std::exp(-kI * omega * std::abs(dt)) / (2.0 * omega);
}

cplx feynman_propagator_oracle(double omega, double dt, int truncation, double mass) {
  require_positive(omega, "omega");
  const SliceSpace space = SliceSpace::fock(truncation, mass, omega);
  const double gap = std::abs(dt);
  const double total = gap + 1.0;
  const auto schedule = oracle::EvolutionSchedule::constant(harmonic_hamiltonian(space), total);
  const SliceOperator q = position_operator(space);
  std::vector<oracle::TimedOperator> ops;
  if (gap == 0.0) {
    ops.push_back({0.5, q * q});
  } else {
    ops.push_back({0.5, q});
    ops.push_back({0.5 + gap, q});
  }
  const CVector vac = CVector::Unit(truncation, 0);
  const cplx amp = oracle::time_ordered_correlator(schedule, ops, vac, vac);
  return mass * amp / oracle::vacuum_amplitude(omega, total, truncation, mass);
}

FrequencyIntegral frequency_integral_DF(double omega, double dt, double eta, double cutoff) {
  require_positive(omega, "omega");
  require_positive(eta, "eta");
  if (!(cutoff > 2.0 * omega)) throw InvalidArgument("frequency_integral_DF: need Lambda > 2 omega");
  using boost::math::quadrature::gauss_kronrod;

  // Even in w: (i/pi) int_0^Lambda cos(w dt) / (w^2 - omega^2 + i eta) dw.
  auto integrate = [&](double e) {
    const double hw = e / (2.0 * omega);
    std::vector<double> cuts{0.0};
    std::vector<double> lower, upper;
    for (double s = hw; s < 0.5 * omega; s *= 4.0) {
      lower.push_back(omega - s);
      upper.push_back(omega + s);
    }
    for (auto it = lower.rbegin(); it != lower.rend(); ++it) cuts.push_back(*it);
    cuts.push_back(omega);
    for (double u : upper) cuts.push_back(u);
    for (double x = 1.5 * omega; x < cutoff; x += 5.0) cuts.push_back(x);
    cuts.push_back(cutoff);

    auto re = [&](double w) {
      const double x = (w - omega) * (w + omega);
      return std::cos(w * dt) * x / (x * x + e * e);
    };
    auto im = [&](double w) {
      const double x = (w - omega) * (w + omega);
      return -std::cos(w * dt) * e / (x * x + e * e);
    };
    double sum_re = 0.0, sum_im = 0.0, err = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      if (!(cuts[i + 1] > cuts[i])) continue;
      double e1 = 0.0, e2 = 0.0;
      sum_re += gauss_kronrod<double, 61>::integrate(re, cuts[i], cuts[i + 1], 15, 1e-13, &e1);
      sum_im += gauss_kronrod<double, 61>::integrate(im, cuts[i], cuts[i + 1], 15, 1e-13, &e2);
      err += std::abs(e1) + std::abs(e2);
    }
    const cplx value = kI / kPi * cplx(sum_re, sum_im);
    if (!(err < 1e-6 * std::max(1.0, std::abs(value)))) {
      std::ostringstream msg;
      msg << "frequency_integral_DF: quadrature error estimate " << err << " too large";
      throw NonConvergence(msg.str());
    }
    return value;
  };

  FrequencyIntegral r{};
  r.value = integrate(eta);
  r.value_half = integrate(eta / 2.0);
  r.extrapolated = 2.0 * r.value_half - r.value;
  r.eta_change = std::abs(r.value - r.value_half);
  r.tail_bound = 1.0 / (kPi * cutoff);
  return r;
}

}  // namespace pathint::osc
