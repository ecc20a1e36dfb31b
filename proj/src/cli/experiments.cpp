#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "pathint/canonical_oracle.hpp"
#include "pathint/cli.hpp"
#include "pathint/continuum_scan.hpp"
#include "pathint/extended_space.hpp"
#include "pathint/oscillator.hpp"
#include "pathint/slice_space.hpp"
#include "record.hpp"

namespace pathint::cli {
namespace {

SliceSpace grid_from(const Params& p) {
  const int m = p.integer("M", 2);
  return SliceSpace::centered_grid(m, p.number_or("length", static_cast<double>(m)));
}

SliceOperator harmonic_grid(const SliceSpace& space, double omega, double mass) {
  return build_hamiltonian(space, [=](double q) { return 0.5 * mass * omega * omega * q * q; }, mass);
}

CMatrix exact_evolution(const SliceOperator& h, double total) {
  return oracle::evolve(oracle::EvolutionSchedule::constant(h, total), total).matrix();
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

// ---------------------------------------------------------------------------
// extended space

void propagator_identity(Context& c) {
  const Params& p = c.params;
  const SliceSpace space = grid_from(p);
  const int n = p.integer("N", 1);
  const double eps = p.number("eps");
  const int pairs = p.integer_or("pairs", 5, 1);
  std::mt19937_64 rng(c.seed);
  const SliceOperator h = random_hermitian(space, rng);
  const ActionSpec spec = ActionSpec::time_independent(h, n, eps);
  const CMatrix u = exact_evolution(h, n * eps);

  Table& t = c.record.table("pairs", {"q_in", "q_out", "trace_re", "trace_im", "oracle_re", "oracle_im", "rel_err"});
  double worst = 0.0;
  for (int k = 0; k < pairs; ++k) {
    const int q = static_cast<int>(rng() % space.dim());
    const int qp = static_cast<int>(rng() % space.dim());
    const cplx lhs = propagator_via_trace(spec, q, qp, c.par);
    const cplx rhs = u(qp, q);
    worst = std::max(worst, rel(lhs, rhs));
    t.add({double(q), double(qp), lhs.real(), lhs.imag(), rhs.real(), rhs.imag(), rel(lhs, rhs)});
  }
  c.record.scalar("max_relative_error", worst);
  c.record.verdict("propagator_relative_error", worst, p.number_or("tolerance", 1e-10));
}

void correlator_identity(Context& c) {
  const Params& p = c.params;
  const SliceSpace space = grid_from(p);
  const int n = p.integer("N", 1);
  const double eps = p.number("eps");
  const double omega = p.number("omega");
  const double mass = p.number_or("mass", 1.0);
  const SliceOperator h = harmonic_grid(space, omega, mass);
  const SliceOperator q = position_operator(space);
  const auto slots = p.integers_or("insertions", {}, 0);
  if (slots.empty()) throw ConfigError("params.insertions: need at least one slice index");

  InsertionList ins;
  std::vector<oracle::TimedOperator> ops;
  for (int s : slots) {
    ins.add(s, q);
    ops.push_back({s * eps, q});
  }
  const ActionSpec spec = ActionSpec::time_independent(h, n, eps);
  const auto schedule = oracle::EvolutionSchedule::constant(h, n * eps);
  Table& t = c.record.table("pairs", {"q_in", "q_out", "trace_re", "trace_im", "oracle_re", "oracle_im", "rel_err"});
  double worst = 0.0;
  for (int a = 0; a < space.dim(); ++a)
    for (int b = 0; b < space.dim(); ++b) {
      const cplx lhs = correlator_via_trace(spec, ins, a, b, c.par);
      const cplx rhs = oracle::time_ordered_correlator(schedule, ops, a, b);
      worst = std::max(worst, rel(lhs, rhs));
      t.add({double(a), double(b), lhs.real(), lhs.imag(), rhs.real(), rhs.imag(), rel(lhs, rhs)});
    }
  c.record.scalar("max_relative_error", worst);
  c.record.verdict("correlator_relative_error", worst, p.number_or("tolerance", 1e-10));

  if (p.has("beta")) {
    // Thermal correlator: Wick-rotated trace with insertions at angles t beta / N.
    const double beta = p.number("beta");
    const ActionSpec wick = ActionSpec::time_independent(h, n, cplx(0.0, -beta / n));
    std::vector<oracle::TimedOperator> angles;
    for (int s : slots) angles.push_back({s * beta / n, q});
    const cplx lhs = full_trace(wick, ins, TraceRoute::Auto, c.par) / full_trace(wick, {}, TraceRoute::Auto, c.par);
    const cplx rhs = oracle::thermal_correlator(h, beta, angles);
    c.record.complex("thermal_trace", lhs);
    c.record.complex("thermal_oracle", rhs);
    c.record.verdict("thermal_relative_error", rel(lhs, rhs), p.number_or("tolerance", 1e-10));
  }
}

void trace_identity(Context& c) {
  const Params& p = c.params;
  const SliceSpace space = grid_from(p);
  const int n = p.integer("N", 1);
  const double eps = p.number("eps");
  const double omega = p.number("omega");
  const SliceOperator h = harmonic_grid(space, omega, 1.0);
  const ActionSpec spec = ActionSpec::time_independent(h, n, eps);
  const cplx rhs = exact_evolution(h, n * eps).trace();
  const cplx mf = full_trace(spec, {}, TraceRoute::MatrixFree, c.par);
  const cplx ps = full_trace(spec, {}, TraceRoute::PathSum, c.par);
  const cplx mom = full_trace(spec.in_basis(dft_momentum_basis(space).matrix()), {}, TraceRoute::Auto, c.par);
  const double tol = p.number_or("tolerance", 1e-12);
  c.record.complex("trace_oracle", rhs);
  c.record.complex("trace_matrix_free", mf);
  c.record.complex("trace_path_sum", ps);
  c.record.complex("trace_momentum_basis", mom);
  c.record.verdict("matrix_free_relative_error", rel(mf, rhs), tol);
  c.record.verdict("path_sum_relative_error", rel(ps, rhs), tol);
  c.record.verdict("momentum_basis_relative_error", rel(mom, rhs), tol);

  if (p.has("beta")) {
    const double beta = p.number("beta");
    const int d = p.integer_or("wick_truncation", 40, 2);
    const int slices = p.integer_or("wick_slices", n, 1);
    auto z = [&](int dim) {
      const SliceSpace fock = SliceSpace::fock(dim, 1.0, omega);
      return full_trace(ActionSpec::time_independent(harmonic_hamiltonian(fock), slices, cplx(0.0, -beta / slices)),
                        {}, TraceRoute::Auto, c.par);
    };
    const cplx z1 = z(d), z2 = z(2 * d);
    const double closed = 1.0 / (2.0 * std::sinh(beta * omega / 2.0));
    Table& t = c.record.table("wick_sweep", {"truncation", "trace_re", "trace_im", "closed_form", "rel_err"});
    t.add({double(d), z1.real(), z1.imag(), closed, rel(z1, closed)});
    t.add({double(2 * d), z2.real(), z2.imag(), closed, rel(z2, closed)});
    const double wtol = p.number_or("wick_tolerance", 1e-8);
    c.record.verdict("wick_truncation_change", std::abs(z1 - z2), wtol);
    c.record.verdict("wick_relative_error", rel(z2, closed), wtol);
  }
}

void partial_trace(Context& c) {
  const Params& p = c.params;
  const SliceSpace space = grid_from(p);
  const int n = p.integer("N", 1);
  const double eps = p.number("eps");
  const SliceOperator h = harmonic_grid(space, p.number("omega"), 1.0);
  const SliceOperator r = partial_trace_action(ActionSpec::time_independent(h, n, eps), c.par);
  const CMatrix u = exact_evolution(h, n * eps);
  const double err = (r.matrix() - u).norm() / u.norm();
  c.record.scalar("frobenius_relative_error", err);
  c.record.verdict("partial_trace_relative_error", err, p.number_or("tolerance", 1e-10));
}

void interleaving_identity(Context& c) {
  const Params& p = c.params;
  const SliceSpace space = grid_from(p);
  const int n = p.integer("N", 1);
  const int segments = p.integer_or("segments", 2, 1);
  std::mt19937_64 rng(c.seed);
  std::vector<SliceOperator> seg;
  for (int s = 0; s < segments; ++s) seg.push_back(random_hermitian(space, rng));
  std::vector<SliceOperator> hs;
  for (int t = 0; t < n; ++t) hs.push_back(seg[static_cast<std::size_t>(t) * segments / n]);
  const double residual = verify_interleaving_identity(ActionSpec::piecewise(hs, p.number("eps")));
  c.record.scalar("frobenius_residual", residual);
  c.record.verdict("interleaving_residual", residual, p.number_or("tolerance", 1e-10));
}

void discrete_schrodinger(Context& c) {
  const Params& p = c.params;
  const SliceSpace space = grid_from(p);
  const SliceOperator h = harmonic_grid(space, p.number("omega"), 1.0);
  const ActionSpec spec = ActionSpec::time_independent(h, p.integer("N", 1), p.number("eps"));
  Table& t = c.record.table("pairs", {"q_in", "q_out", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "abs_diff"});
  double worst = 0.0;
  for (int a = 0; a < space.dim(); ++a)
    for (int b = 0; b < space.dim(); ++b) {
      const ComplexPair r = verify_discrete_schrodinger(spec, h, a, b);
      worst = std::max(worst, r.abs_diff());
      t.add({double(a), double(b), r.lhs.real(), r.lhs.imag(), r.rhs.real(), r.rhs.imag(), r.abs_diff()});
    }
  c.record.scalar("max_abs_diff", worst);
  c.record.verdict("schrodinger_abs_diff", worst, p.number_or("tolerance", 1e-12));
}

void legendre_phase(Context& c) {
  const Params& p = c.params;
  const SliceSpace space = grid_from(p);
  const auto slices = p.integers_or("slices", {2, 3}, 1);
  const int samples = p.integer_or("samples", 20, 1);
  std::mt19937_64 rng(c.seed);
  Table& t = c.record.table("samples", {"N", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "abs_diff"});
  double worst = 0.0;
  for (int n : slices)
    for (int k = 0; k < samples; ++k) {
      std::vector<int> q(n), mom(n);
      for (int s = 0; s < n; ++s) {
        q[s] = static_cast<int>(rng() % space.dim());
        mom[s] = static_cast<int>(rng() % space.dim());
      }
      const ComplexPair r = verify_legendre_phase(space, q, mom);
      worst = std::max(worst, r.abs_diff());
      t.add({double(n), r.lhs.real(), r.lhs.imag(), r.rhs.real(), r.rhs.imag(), r.abs_diff()});
    }
  c.record.scalar("max_abs_diff", worst);
  c.record.verdict("legendre_abs_diff", worst, p.number_or("tolerance", 1e-12));
}

void trotter_order(Context& c) {
  const Params& p = c.params;
  const SliceSpace space = SliceSpace::centered_grid(p.integer("M", 2), p.number("length"));
  const double power = p.number_or("potential_power", 4.0);
  const double coeff = p.number_or("potential_coefficient", 1.0);
  const auto eps = p.numbers("eps_list");
  const auto table = trotter_order_experiment(
      space, [=](double q) { return coeff * std::pow(std::abs(q), power); }, p.number_or("mass", 1.0), p.number("T"),
      eps);
  Table& t = c.record.table("errors", {"eps", "steps", "error"});
  for (const auto& row : table.rows) t.add({row.eps, double(row.steps), row.error});
  c.record.scalar("slope", table.slope);
  c.record.verdict("slope_deviation_from_1", std::abs(table.slope - 1.0), p.number_or("slope_tolerance", 0.15), true);
}

// ---------------------------------------------------------------------------
// oscillator analytics

void partition_product(Context& c) {
  const Params& p = c.params;
  const double omega = p.number("omega");
  const double total = p.number("T");
  const auto slices = p.integers_or("slices", {3, 11, 101}, 1);
  const cplx closed = osc::partition_closed_form(total, omega);
  c.record.complex("closed_form", closed);
  Table& t = c.record.table("mode_product", {"N", "value_re", "value_im", "abs_diff"});
  double worst = 0.0;
  for (int n : slices) {
    const cplx v = osc::mode_partition_product(n, total / n, omega);
    worst = std::max(worst, std::abs(v - closed));
    t.add({double(n), v.real(), v.imag(), std::abs(v - closed)});
  }
  const double tol = p.number_or("tolerance", 1e-12);
  c.record.verdict("mode_product_abs_diff", worst, tol);

  // Finite product without the vacuum factor, every odd N.
  const int max_odd = p.integer_or("max_odd_slices", 101, 1);
  Table& f = c.record.table("finite_product", {"N", "value_re", "value_im", "abs_diff"});
  double worst_finite = 0.0;
  for (int n = 1; n <= max_odd; n += 2) {
    const auto fp = scan::finite_product(n, omega, total);
    worst_finite = std::max(worst_finite, fp.abs_diff());
    f.add({double(n), fp.value.real(), fp.value.imag(), fp.abs_diff()});
  }
  c.record.verdict("finite_product_abs_diff", worst_finite, tol);

  // Extended-space trace on a Fock truncation along t -> (1 - i eta) t.
  const int d = p.integer_or("fock_truncation", 200, 2);
  const int fn = p.integer_or("fock_slices", 4, 1);
  const double eta = p.number_or("fock_eta", 0.1);
  const cplx contour(1.0, -eta);
  auto fock_trace = [&](int dim) {
    const SliceSpace fock = SliceSpace::fock(dim, 1.0, omega);
    return full_trace(ActionSpec::time_independent(harmonic_hamiltonian(fock), fn, contour * (total / fn)), {},
                      TraceRoute::Auto, c.par);
  };
  const cplx tr = fock_trace(d), tr2 = fock_trace(2 * d);
  const cplx product = osc::mode_partition_product(fn, total / fn, omega * contour);
  c.record.complex("fock_trace", tr);
  c.record.complex("fock_mode_product", product);
  c.record.scalar("fock_truncation_change", std::abs(tr - tr2));
  c.record.verdict("fock_trace_abs_diff", std::abs(tr - product), p.number_or("fock_tolerance", 1e-7));
}

void mixing_determinant(Context& c) {
  const Params& p = c.params;
  const double omega = p.number("omega");
  const double total = p.number("T");
  const int max_n = p.integer_or("max_slices", 64, 1);
  Table& t = c.record.table("determinants", {"N", "det_re", "det_im", "product_re", "product_im", "abs_diff",
                                             "reduced_det_re", "reduced_det_im"});
  double worst = 0.0;
  for (int n = 1; n <= max_n; ++n) {
    const double eps = total / n;
    const auto m = osc::mixing_matrix(n, eps, eps, omega);
    const cplx det = osc::determinant(m);
    const cplx prod = osc::mode_product(n, eps, eps, omega);
    const cplx red = n >= 2 ? osc::determinant(osc::reduced(m)) : cplx(1.0);
    worst = std::max(worst, std::abs(det - prod));
    t.add({double(n), det.real(), det.imag(), prod.real(), prod.imag(), std::abs(det - prod), red.real(), red.imag()});
  }
  c.record.verdict("det_product_abs_diff", worst, p.number_or("det_tolerance", 1e-11));

  const auto vac_slices = p.integers_or("vacuum_slices", {4, 8, 16}, 2);
  const cplx oracle_amp = oracle::vacuum_amplitude(omega, total, p.integer_or("vacuum_truncation", 8, 2));
  c.record.complex("vacuum_oracle", oracle_amp);
  double worst_vac = 0.0;
  for (int n : vac_slices) worst_vac = std::max(worst_vac, rel(osc::vacuum_persistence_det(n, total / n, omega), oracle_amp));
  c.record.verdict("vacuum_relative_error", worst_vac, p.number_or("vacuum_tolerance", 1e-9));

  const int in = p.integer_or("identity_slices", 3, 1);
  const int id = p.integer_or("identity_truncation", 4, 2);
  const double residual = osc::mixing_identity_residual(in, total / in, omega, id);
  c.record.verdict("mixing_identity_residual", residual, p.number_or("identity_tolerance", 1e-9));
}

void green_function(Context& c) {
  const Params& p = c.params;
  const double total = p.number("T");
  const double omega = p.number("omega");
  const int k = p.integer("cutoff", 1);
  const auto deltas = p.numbers("deltas");
  const double eps = p.number("eps");

  Table& t = c.record.table("green", {"delta", "G_re", "G_im", "G_minus_re", "G_minus_im", "change_K_2K"});
  double asym = 0.0;
  for (double d : deltas) {
    const auto g = osc::green_function(total, omega, k, d);
    const auto gm = osc::green_function(total, omega, k, -d);
    asym = std::max(asym, std::abs(g.value - gm.value));
    t.add({d, g.value.real(), g.value.imag(), gm.value.real(), gm.value.imag(), g.change()});
  }
  c.record.verdict("symmetry_abs_diff", asym, p.number_or("symmetry_tolerance", 1e-12));

  // K vs 2K changes over K, 2K, 4K, 8K.
  Table& conv = c.record.table("convergence", {"K", "change_K_2K"});
  double prev = HUGE_VAL;
  int violations = 0;
  for (int kk = k; kk <= 8 * k; kk *= 2) {
    const double ch = osc::green_function(total, omega, kk, deltas.front()).change();
    conv.add({double(kk), ch});
    if (!(ch < prev)) ++violations;
    prev = ch;
  }
  c.record.verdict("convergence_violations", violations, 0.0, true);

  // Lattice residual order: eps vs eps / 2 at fixed K.
  const double d0 = deltas.front();
  const double r1 = std::abs(osc::green_lattice_residual(total, omega, k, d0, eps));
  const double r2 = std::abs(osc::green_lattice_residual(total, omega, k, d0, eps / 2.0));
  const double order = std::log2(r1 / r2);
  c.record.scalar("lattice_residual_eps", r1);
  c.record.scalar("lattice_residual_half_eps", r2);
  c.record.scalar("lattice_order", order);
  c.record.verdict("lattice_order_deviation_from_2", std::abs(order - 2.0), p.number_or("order_tolerance", 0.2), true);

  // omega = 0 with the zero mode removed vs the quadratic Fourier series.
  const osc::GreenOptions no_zero{true, osc::kResonanceRadius};
  Table& zt = c.record.table("zero_frequency", {"delta", "K", "sum_im", "closed_im", "abs_diff"});
  int worse = 0;
  for (double d : deltas) {
    const double x = d - total * std::floor(d / total);
    const cplx closed = osc::green_zero_frequency_closed(total, x);
    const auto g = osc::green_function(total, 0.0, k, d, no_zero);
    const double e1 = std::abs(g.value - closed), e2 = std::abs(g.doubled - closed);
    zt.add({d, double(k), g.value.imag(), closed.imag(), e1});
    zt.add({d, double(2 * k), g.doubled.imag(), closed.imag(), e2});
    if (!(e2 <= e1)) ++worse;
  }
  c.record.verdict("zero_frequency_non_improving", worse, 0.0, true);
}

// Whitespace- or comma-separated numbers.
std::vector<double> read_samples(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("params.source_file: cannot open " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  std::string body = ss.str();
  std::replace(body.begin(), body.end(), ',', ' ');
  std::istringstream words(body);
  std::vector<double> out;
  for (std::string w; words >> w;) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(w, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != w.size() || !std::isfinite(v))
      throw ConfigError("params.source_file: bad sample '" + w + "' in " + file.string());
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("params.source_file: no samples in " + file.string());
  return out;
}

// Exactly one of: amplitude (single mode), source_samples, source_file.
osc::SourceSpec source_from(const Context& c) {
  const Params& p = c.params;
  const int given = int(p.has("amplitude")) + int(p.has("source_samples")) + int(p.has("source_file"));
  if (given != 1) throw ConfigError("params.amplitude: give exactly one of amplitude, source_samples, source_file");
  const double total = p.number("T"), mass = p.number_or("mass", 1.0), omega = p.number("omega");
  if (p.has("source_samples")) return osc::SourceSpec::from_samples(total, mass, omega, p.numbers("source_samples"));
  if (p.has("source_file")) {
    std::filesystem::path file = p.text("source_file");
    if (file.is_relative()) file = c.base / file;
    return osc::SourceSpec::from_samples(total, mass, omega, read_samples(file));
  }
  return osc::SourceSpec::single_mode(total, mass, omega, p.number("amplitude"), p.integer_or("mode", 1, -1000000));
}

void generating_functional(Context& c) {
  const Params& p = c.params;
  const osc::SourceSpec src = source_from(c);
  osc::GeneratingFunctionalOptions opt;
  opt.truncation = p.integer_or("truncation", opt.truncation, 2);
  opt.slices = p.integer_or("slices", opt.slices, 1);
  opt.eta = p.number_or("eta", opt.eta);
  opt.mode_factor = p.integer_or("mode_factor", opt.mode_factor, 1);
  opt.sweep_tolerance = p.number_or("sweep_tolerance", opt.sweep_tolerance);
  const auto gf = osc::generating_functional_discrete(src, opt);

  c.record.complex("Z", gf.z);
  c.record.complex("Z_truncation_doubled", gf.z_truncation);
  c.record.complex("Z_slices_doubled", gf.z_slices);
  c.record.complex("contour_action", gf.action);
  c.record.complex("exp_i_action", gf.target);
  c.record.scalar("real_time_action", gf.real_time_action);
  c.record.scalar("abs_Z", std::abs(gf.z));
  c.record.scalar("truncation_change", gf.truncation_change);
  c.record.scalar("slicing_change", gf.slicing_change);
  if (!gf.converged) {
    c.record.set_inconclusive("(d, N) sweep did not converge: changes " + std::to_string(gf.truncation_change) + ", " +
                              std::to_string(gf.slicing_change));
    return;
  }
  c.record.verdict("relative_error", gf.relative_error, p.number_or("tolerance", 1e-6));

  // Cyclic time translation of the source (by a whole number of slices) leaves Z unchanged.
  std::vector<double> values = src.slice_values(opt.slices);
  std::rotate(values.begin(), values.begin() + std::max(1, opt.slices / 4), values.end());
  const auto moved = osc::SourceSpec::from_samples(src.total_time, src.mass, src.omega, values);
  const auto gf_moved = osc::generating_functional_discrete(moved, opt);
  c.record.verdict("translation_abs_diff", std::abs(gf_moved.z - gf.z), p.number_or("tolerance", 1e-6));

  // |Z| -> 1 as eta -> 0: report the modulus of e^{iS} along a shrinking eta.
  Table& t = c.record.table("eta_trend", {"eta", "abs_exp_i_action"});
  const int cutoff = opt.mode_factor * opt.slices;
  for (double e = opt.eta; e > opt.eta / 100.0; e /= 4.0)
    t.add({e, std::abs(std::exp(kI * osc::classical_action_of_source(src, cutoff, opt.slices, cplx(1.0, -e))))});

  const auto taus = p.numbers_or("taus", {0.1, 1.0, 10.0});
  const cplx reference = osc::classical_action_of_source(src, cutoff, opt.slices);
  double spread = 0.0;
  for (double tau : taus)
    spread = std::max(spread, rel(osc::source_shift_transform(src, cutoff, opt.slices, tau).action, reference));
  c.record.verdict("tau_independence", spread, p.number_or("tau_tolerance", 1e-12));
}

void source_shift(Context& c) {
  const Params& p = c.params;
  const osc::SourceSpec src = source_from(c);
  const int cutoff = p.integer("cutoff", 0);
  const int slices = p.integer("slices", 1);
  const auto taus = p.numbers_or("taus", {0.1, 1.0, 10.0});
  const cplx reference = osc::classical_action_of_source(src, cutoff, slices);
  c.record.complex("classical_action", reference);
  double spread = 0.0, pf = 0.0;
  Table& actions = c.record.table("actions", {"tau", "action_re", "action_im"});
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const auto table = osc::source_shift_transform(src, cutoff, slices, taus[i]);
    spread = std::max(spread, rel(table.action, reference));
    pf = std::max(pf, table.partial_fraction_residual);
    actions.add({taus[i], table.action.real(), table.action.imag()});
    if (i == 0) {
      Table& d = c.record.table("displacements", {"n", "d_re", "d_im"});
      for (std::size_t k = 0; k < table.modes.size(); ++k)
        d.add({double(table.modes[k]), table.displacements[k].real(), table.displacements[k].imag()});
    }
  }
  c.record.verdict("partial_fraction_residual", pf, p.number_or("pf_tolerance", 1e-14));
  c.record.verdict("tau_independence", spread, p.number_or("tau_tolerance", 1e-12));
}

void feynman_propagator(Context& c) {
  const Params& p = c.params;
  const double omega = p.number("omega");
  const auto dts = p.numbers("dts");
  const int d = p.integer_or("truncation", 40, 3);
  const double eta = p.number_or("eta", 1e-3);
  const double cutoff = p.number_or("cutoff", 1e3);
  Table& t = c.record.table("propagator", {"dt", "closed_re", "closed_im", "oracle_re", "oracle_im", "integral_re",
                                           "integral_im", "extrapolated_re", "extrapolated_im", "eta_change"});
  double worst_oracle = 0.0, worst_int = 0.0, tail = 0.0;
  for (double dt : dts) {
    const cplx closed = osc::feynman_propagator_closed(omega, dt);
    const cplx orc = osc::feynman_propagator_oracle(omega, dt, d);
    const auto fi = osc::frequency_integral_DF(omega, dt, eta, cutoff);
    worst_oracle = std::max(worst_oracle, std::abs(orc - closed));
    worst_int = std::max(worst_int, std::abs(fi.value - closed));
    tail = fi.tail_bound;
    t.add({dt, closed.real(), closed.imag(), orc.real(), orc.imag(), fi.value.real(), fi.value.imag(),
           fi.extrapolated.real(), fi.extrapolated.imag(), fi.eta_change});
  }
  c.record.scalar("tail_bound", tail);
  c.record.verdict("oracle_abs_diff", worst_oracle, p.number_or("oracle_tolerance", 1e-8));
  c.record.verdict("integral_abs_diff", worst_int, p.number_or("integral_tolerance", 1e-3));
}

// ---------------------------------------------------------------------------
// continuum scan

scan::ScanConfig scan_from(const Params& p) {
  scan::ScanConfig cfg;
  cfg.omega = p.number("omega");
  cfg.total_time = p.number("T");
  cfg.lambda = p.number("lambda");
  cfg.tail_tolerance = p.number_or("tail_tolerance", cfg.tail_tolerance);
  cfg.max_cutoff = static_cast<long>(p.number_or("max_cutoff", static_cast<double>(cfg.max_cutoff)));
  cfg.taus = scan::ScanConfig::geometric_schedule(p.number_or("tau0", 0.1), p.number_or("ratio", 0.5),
                                                  p.integer_or("steps", 8, 1));
  cfg.validate();
  return cfg;
}

void conjecture_scan(Context& c) {
  const Params& p = c.params;
  const scan::ScanConfig cfg = scan_from(p);
  const auto r = scan::conjecture_scan(cfg, p.integer_or("trend_steps", 4, 1), p.number_or("error_threshold", 5e-3),
                                       c.par);
  std::vector<std::string> cols{"tau", "cutoff", "tail_bound"};
  for (const auto& l : r.labels) {
    cols.push_back(l + "_re");
    cols.push_back(l + "_im");
    cols.push_back(l + "_err");
  }
  Table& t = c.record.table("conjecture_scan", cols);
  for (const auto& row : r.rows) {
    std::vector<double> v{row.tau, double(row.cutoff), row.tail_bound};
    for (int k = 0; k < scan::kVariantCount; ++k) {
      v.push_back(row.values[k].real());
      v.push_back(row.values[k].imag());
      v.push_back(row.errors[k]);
    }
    t.add(v);
  }
  for (int k = 0; k < scan::kVariantCount; ++k) {
    c.record.complex("target_" + r.labels[k], r.targets[k]);
    c.record.integer("monotone_tail_" + r.labels[k], r.monotone_tail[k] ? 1 : 0);
  }
  c.record.text("best_variant", r.labels[r.best_variant]);
  c.record.verdict("best_variant_non_monotone", r.monotone_tail[r.best_variant] ? 0.0 : 1.0, 0.0, true);
  c.record.verdict("best_final_error", r.best_error, r.error_threshold);
}

void analyticity_probe(Context& c) {
  const Params& p = c.params;
  scan::ScanConfig cfg = scan_from(p);
  cfg.variant = p.number_or("inverse", 1.0) != 0.0 ? scan::Variant::Inverse : scan::Variant::Product;
  cfg.vacuum_factor = p.number_or("vacuum_factor", 1.0) != 0.0;
  const auto samples = p.complex_numbers("samples");
  const auto rows = scan::analyticity_probe(cfg, samples);
  Table& t = c.record.table("probe", {"tau_re", "tau_im", "value_re", "value_im", "cutoff", "tail_bound"});
  for (const auto& r : rows)
    t.add({r.tau.real(), r.tau.imag(), r.value.real(), r.value.imag(), double(r.cutoff), r.tail_bound});
  const cplx center = p.has("square_center") ? p.complex_number("square_center") : cplx(0.05, 0.005);
  const double residual = scan::cauchy_riemann_residual(cfg, center, p.number_or("square_h", 1e-3));
  c.record.scalar("cauchy_riemann_residual", residual);
  c.record.verdict("cauchy_riemann_residual", residual, p.number_or("cr_tolerance", 1e-3));
}

struct Entry {
  ExperimentInfo info;
  ExperimentFn fn;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries{
      {{"propagator-identity", "partial trace of e^{iS} vs exact <q'|U(T)|q> for a seeded random H",
        {"M", "N", "eps"}, {"length", "pairs", "tolerance"}, true},
       propagator_identity},
      {{"correlator-identity", "q insertions in the trace vs time-ordered correlators (and thermal with beta)",
        {"M", "N", "eps", "omega", "insertions"}, {"length", "mass", "beta", "tolerance"}, false},
       correlator_identity},
      {{"trace-identity", "full trace vs Tr U(T), both trace routes and the momentum basis; Wick sweep with beta",
        {"M", "N", "eps", "omega"}, {"length", "beta", "wick_truncation", "wick_slices", "tolerance", "wick_tolerance"},
        false},
       trace_identity},
      {{"partial-trace", "Tr over slices t != 0 of e^{iS} vs U(T) as a matrix", {"M", "N", "eps", "omega"},
        {"length", "tolerance"}, false},
       partial_trace},
      {{"interleaving-identity", "dense e^{iS} vs U_0(T) V^dagger e^{iP eps} V for piecewise random H",
        {"M", "N", "eps"}, {"length", "segments", "tolerance"}, true},
       interleaving_identity},
      {{"discrete-schrodinger", "difference of traces on H (x) h_N vs <q'|U(T)(e^{-iH eps} - 1)|q>",
        {"M", "N", "eps", "omega"}, {"length", "tolerance"}, false},
       discrete_schrodinger},
      {{"legendre-phase", "shift of tensor plane waves vs the discrete Legendre phase", {"M"},
        {"length", "slices", "samples", "tolerance"}, true},
       legendre_phase},
      {{"trotter-order", "split-step error vs eps for V = c |q|^k; log-log slope", {"M", "length", "T", "eps_list"},
        {"mass", "potential_power", "potential_coefficient", "slope_tolerance"}, false},
       trotter_order},
      {{"partition-product", "mode product vs 1/(2i sin(omega T/2)), finite product, Fock trace cross-check",
        {"omega", "T"}, {"slices", "max_odd_slices", "fock_truncation", "fock_slices", "fock_eta", "tolerance",
                         "fock_tolerance"},
        false},
       partition_product},
      {{"mixing-determinant", "det M(eps) vs mode product, vacuum persistence, operator mixing identity",
        {"omega", "T"}, {"max_slices", "vacuum_slices", "vacuum_truncation", "identity_slices", "identity_truncation",
                         "det_tolerance", "vacuum_tolerance", "identity_tolerance"},
        false},
       mixing_determinant},
      {{"green-function", "mode-sum Green function: symmetry, K vs 2K, lattice residual, omega = 0 series",
        {"T", "omega", "cutoff", "deltas", "eps"}, {"symmetry_tolerance", "order_tolerance"}, false},
       green_function},
      {{"generating-functional", "driven-oscillator trace ratio vs exp(i S_cl[j]) with (d, N) sweep",
        {"T", "omega"}, {"amplitude", "source_samples", "source_file", "mass", "mode", "truncation", "slices", "eta", "mode_factor", "sweep_tolerance",
                                      "taus", "tolerance", "tau_tolerance"},
        false},
       generating_functional},
      {{"source-shift", "per-mode source displacements, partial fractions and tau independence",
        {"T", "omega", "cutoff", "slices"}, {"amplitude", "source_samples", "source_file", "mass", "mode", "taus", "pf_tolerance", "tau_tolerance"},
        false},
       source_shift},
      {{"feynman-propagator", "closed form vs Fock oracle vs frequency integral", {"omega", "dts"},
        {"truncation", "eta", "cutoff", "oracle_tolerance", "integral_tolerance"}, false},
       feynman_propagator},
      {{"conjecture-scan", "regularised mode product along tau -> 0 for all four variants",
        {"omega", "T", "lambda"}, {"tau0", "ratio", "steps", "tail_tolerance", "max_cutoff", "trend_steps",
                                   "error_threshold"},
        false},
       conjecture_scan},
      {{"analyticity-probe", "regularised product at complex tau with Re(tau^3) > 0; Cauchy-Riemann residual",
        {"omega", "T", "lambda", "samples"}, {"tau0", "ratio", "steps", "tail_tolerance", "max_cutoff", "inverse",
                                              "vacuum_factor", "square_center", "square_h", "cr_tolerance"},
        false},
       analyticity_probe},
  };
  return entries;
}

}  // namespace

const std::vector<ExperimentInfo>& experiments() {
  static const std::vector<ExperimentInfo> infos = [] {
    std::vector<ExperimentInfo> v;
    for (const auto& e : registry()) v.push_back(e.info);
    return v;
  }();
  return infos;
}

ExperimentFn find_experiment(const std::string& name) {
  for (const auto& e : registry())
    if (e.info.name == name) return e.fn;
  return nullptr;
}

const std::vector<Coverage>& coverage() {
  static const std::vector<Coverage> table{
      {"build_hamiltonian", {"correlator-identity", "trace-identity", "trotter-order"}},
      {"propagator_step", {"propagator-identity", "trace-identity"}},
      {"dft_momentum_basis", {"trace-identity", "legendre-phase"}},
      {"apply_time_shift", {"legendre-phase", "propagator-identity"}},
      {"apply_slicewise", {"propagator-identity", "trace-identity"}},
      {"apply_action", {"propagator-identity", "partial-trace"}},
      {"propagator_via_trace", {"propagator-identity", "discrete-schrodinger"}},
      {"full_trace", {"trace-identity", "partition-product", "correlator-identity"}},
      {"correlator_via_trace", {"correlator-identity"}},
      {"partial_trace_action", {"partial-trace"}},
      {"verify_legendre_phase", {"legendre-phase"}},
      {"verify_interleaving_identity", {"interleaving-identity"}},
      {"verify_discrete_schrodinger", {"discrete-schrodinger"}},
      {"trotter_order_experiment", {"trotter-order"}},
      {"evolve", {"propagator-identity", "trace-identity", "partial-trace"}},
      {"time_ordered_correlator", {"correlator-identity", "feynman-propagator"}},
      {"vacuum_amplitude", {"mixing-determinant", "feynman-propagator"}},
      {"thermal_correlator", {"correlator-identity"}},
      {"mode_partition_product", {"partition-product"}},
      {"mixing_matrix", {"mixing-determinant"}},
      {"vacuum_persistence_det", {"mixing-determinant"}},
      {"green_function", {"green-function"}},
      {"classical_action_of_source", {"generating-functional", "source-shift"}},
      {"generating_functional_discrete", {"generating-functional"}},
      {"source_shift_transform", {"source-shift", "generating-functional"}},
      {"feynman_propagator_closed", {"feynman-propagator"}},
      {"frequency_integral_DF", {"feynman-propagator"}},
      {"regularized_product", {"conjecture-scan", "analyticity-probe"}},
      {"conjecture_scan", {"conjecture-scan"}},
      {"analyticity_probe", {"analyticity-probe"}},
  };
  return table;
}

}  // namespace pathint::cli
