#include "pathint/continuum_scan.hpp"

#include <cmath>
#include <sstream>

#include "pathint/errors.hpp"
#include "pathint/oscillator.hpp"

namespace pathint::scan {
namespace {

// log(1 - z), accurate for small |z|.
cplx clog1m(cplx z) { return 2.0 * std::atanh(-z / (2.0 - z)); }

constexpr std::array<std::pair<Variant, bool>, kVariantCount> kVariants{{
    {Variant::Product, false},
    {Variant::Product, true},
    {Variant::Inverse, false},
    {Variant::Inverse, true},
}};

}  // namespace

std::vector<double> ScanConfig::geometric_schedule(double tau0, double ratio, int steps) {
  if (!(tau0 > 0.0) || !(ratio > 0.0 && ratio < 1.0) || steps < 1)
    throw InvalidArgument("geometric_schedule: need tau0 > 0, 0 < ratio < 1, steps >= 1");
  std::vector<double> taus;
  double tau = tau0;
  for (int k = 0; k < steps; ++k, tau *= ratio) taus.push_back(tau);
  return taus;
}

void ScanConfig::validate() const {
  auto finite_positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!std::isfinite(omega)) throw InvalidArgument("ScanConfig: omega must be finite");
  if (!finite_positive(total_time)) throw InvalidArgument("ScanConfig: T must be positive");
  if (!finite_positive(lambda)) throw InvalidArgument("ScanConfig: lambda must be positive");
  if (!finite_positive(tail_tolerance)) throw InvalidArgument("ScanConfig: tail_tolerance must be positive");
  if (max_cutoff < 1) throw InvalidArgument("ScanConfig: max_cutoff must be >= 1");
}

LogProduct regularized_log_product(const ScanConfig& cfg, cplx tau) {
  cfg.validate();
  const cplx tau3 = tau * tau * tau;
  if (!(tau3.real() > 0.0)) {
    std::ostringstream msg;
    msg << "tau = " << tau << " lies outside the region Re(tau^3) > 0";
    throw InvalidArgument(msg.str());
  }
  const double w1 = 2.0 * kPi / cfg.total_time;
  const cplx damp = cfg.lambda * tau3;
  auto z = [&](long n) {
    const double wn = w1 * static_cast<double>(n);
    return std::exp(kI * tau * (wn - cfg.omega) - damp * wn * wn);
  };

  const cplx z0 = z(0);
  if (std::abs(1.0 - z0) < 1e-12) {
    std::ostringstream msg;
    msg << "tau omega = " << tau * cfg.omega << " is a multiple of 2 pi; the n = 0 factor vanishes";
    throw SingularConfiguration(msg.str());
  }

  // |z_n| <= exp(c + b|n| - a n^2)
  const double a = cfg.lambda * tau3.real() * w1 * w1;
  const double b = std::abs(tau.imag()) * w1;
  const double c = tau.imag() * cfg.omega;
  auto tail_bound = [&](long k) {
    const double m = static_cast<double>(k + 1);
    const double decay = a * (2.0 * m + 1.0) - b;
    if (!(decay > 0.0)) return HUGE_VAL;
    const double first = std::exp(c + b * m - a * m * m);
    if (first > 0.5) return HUGE_VAL;
    // two signs, geometric ratio exp(-decay), |log(1 - z)| <= 2|z| for |z| <= 1/2
    return 2.0 * 2.0 * first / (1.0 - std::exp(-decay));
  };

  cplx sum = clog1m(z0);
  for (long n = 1; n <= cfg.max_cutoff; ++n) {
    const cplx lp = clog1m(z(n));
    const cplx lm = clog1m(z(-n));
    sum += lp + lm;
    const double update = std::abs(lp) + std::abs(lm);
    if (update < cfg.tail_tolerance) {
      const double bound = tail_bound(n);
      if (bound < cfg.tail_tolerance) return {sum, n, bound};
    }
  }
  std::ostringstream msg;
  msg << "regularized product at tau = " << tau << " did not reach tail tolerance " << cfg.tail_tolerance
      << " within cutoff " << cfg.max_cutoff << " (last bound " << tail_bound(cfg.max_cutoff) << ")";
  throw NonConvergence(msg.str());
}

cplx variant_value(cplx log_product, Variant variant, bool vacuum_factor, double omega, double total_time) {
  const cplx half = kI * omega * total_time / 2.0;
  if (variant == Variant::Product) return std::exp(log_product + (vacuum_factor ? half : 0.0));
  return std::exp(-log_product - (vacuum_factor ? half : 0.0));
}

cplx variant_target(Variant variant, bool vacuum_factor, double omega, double total_time) {
  const cplx inverse_vac = osc::partition_closed_form(total_time, omega);
  const cplx phase = std::exp(kI * omega * total_time / 2.0);
  const cplx inverse = vacuum_factor ? inverse_vac : phase * inverse_vac;
  return variant == Variant::Inverse ? inverse : 1.0 / inverse;
}

std::string variant_label(Variant variant, bool vacuum_factor) {
  std::string s = variant == Variant::Product ? "product" : "inverse";
  if (vacuum_factor) s += "+vacuum";
  return s;
}

ProductValue regularized_product(const ScanConfig& cfg, cplx tau) {
  const LogProduct lp = regularized_log_product(cfg, tau);
  return {variant_value(lp.log_value, cfg.variant, cfg.vacuum_factor, cfg.omega, cfg.total_time), lp.cutoff,
          lp.tail_bound};
}

FiniteProduct finite_product(int slices, double omega, double total_time) {
  if (slices < 1 || !(total_time > 0.0)) throw InvalidArgument("finite_product: need N >= 1 and T > 0");
  const double eps = total_time / slices;
  if (std::abs(std::sin(omega * total_time / 2.0)) < osc::kPoleGuard)
    throw SingularConfiguration("finite_product: omega T is a multiple of 2 pi");
  return {1.0 / osc::mode_product(slices, eps, eps, omega),
          variant_target(Variant::Inverse, false, omega, total_time)};
}

ScanResult conjecture_scan(const ScanConfig& cfg, int trend_steps, double error_threshold, const Parallel& par) {
  cfg.validate();
  if (cfg.taus.empty()) throw InvalidArgument("conjecture_scan: empty tau schedule");
  for (std::size_t i = 0; i < cfg.taus.size(); ++i) {
    if (!(cfg.taus[i] > 0.0)) throw InvalidArgument("conjecture_scan: tau values must be positive");
    if (i > 0 && !(cfg.taus[i] < cfg.taus[i - 1]))
      throw InvalidArgument("conjecture_scan: tau schedule must be strictly decreasing");
  }
  if (trend_steps < 1) throw InvalidArgument("conjecture_scan: trend_steps must be >= 1");

  ScanResult r{};
  r.trend_steps = trend_steps;
  r.error_threshold = error_threshold;
  for (int v = 0; v < kVariantCount; ++v) {
    r.labels[v] = variant_label(kVariants[v].first, kVariants[v].second);
    r.targets[v] = variant_target(kVariants[v].first, kVariants[v].second, cfg.omega, cfg.total_time);
  }

  r.rows.resize(cfg.taus.size());
  parallel_for(cfg.taus.size(), par, [&](std::size_t i) {
    const LogProduct lp = regularized_log_product(cfg, cfg.taus[i]);
    ScanRow row{cfg.taus[i], lp.cutoff, lp.tail_bound, {}, {}};
    for (int v = 0; v < kVariantCount; ++v) {
      row.values[v] = variant_value(lp.log_value, kVariants[v].first, kVariants[v].second, cfg.omega, cfg.total_time);
      row.errors[v] = std::abs(row.values[v] - r.targets[v]);
    }
    r.rows[i] = row;
  });

  const int n = static_cast<int>(r.rows.size());
  r.best_variant = -1;
  r.best_error = HUGE_VAL;
  for (int v = 0; v < kVariantCount; ++v) {
    bool mono = n > trend_steps;
    for (int i = n - trend_steps; mono && i < n; ++i) mono = r.rows[i].errors[v] < r.rows[i - 1].errors[v];
    r.monotone_tail[v] = mono;
  }
  auto pick = [&](bool require_monotone) {
    for (int v = 0; v < kVariantCount; ++v) {
      if (require_monotone && !r.monotone_tail[v]) continue;
      const double e = r.rows.back().errors[v];
      if (e < r.best_error) {
        r.best_error = e;
        r.best_variant = v;
      }
    }
  };
  pick(true);
  if (r.best_variant < 0) pick(false);
  r.supported = r.monotone_tail[r.best_variant] && r.best_error < error_threshold;
  return r;
}

std::vector<ProbeRow> analyticity_probe(const ScanConfig& cfg, const std::vector<cplx>& samples) {
  for (const cplx& tau : samples) {
    if (!((tau * tau * tau).real() > 0.0)) {
      std::ostringstream msg;
      msg << "analyticity_probe: sample tau = " << tau << " has Re(tau^3) <= 0";
      throw InvalidArgument(msg.str());
    }
  }
  std::vector<ProbeRow> rows;
  rows.reserve(samples.size());
  for (const cplx& tau : samples) {
    const ProductValue pv = regularized_product(cfg, tau);
    rows.push_back({tau, pv.value, pv.cutoff, pv.tail_bound});
  }
  return rows;
}

double cauchy_riemann_residual(const ScanConfig& cfg, cplx tau0, double h) {
  if (!(h > 0.0)) throw InvalidArgument("cauchy_riemann_residual: h must be positive");
  const auto rows = analyticity_probe(cfg, {tau0, tau0 + h, tau0 + kI * h, tau0 + h + kI * h});
  const cplx f00 = rows[0].value, f10 = rows[1].value, f01 = rows[2].value, f11 = rows[3].value;
  const cplx dx = ((f10 - f00) + (f11 - f01)) / (2.0 * h);
  const cplx dy = ((f01 - f00) + (f11 - f10)) / (2.0 * h);
  return std::abs(dy - kI * dx) / std::abs(dx);
}

}  // namespace pathint::scan
