#pragma once

// Regularised infinite mode product
//   F(tau) = prod_n [1 - exp(i tau (omega_n - omega + i eps~ omega_n^2))]^{+-1},
//   eps~ = lambda tau^2,
// evaluated with an adaptive symmetric cutoff, and its tau -> 0+ behaviour.
//
// Four labelled variants are always produced:
//   product            prod_n [...]                      target 2i sin(wT/2) e^{-iwT/2}
//   product+vacuum     e^{iwT/2} prod_n [...]            target 2i sin(wT/2)
//   inverse            prod_n [...]^{-1}                 target e^{iwT/2} / (2i sin(wT/2))
//   inverse+vacuum     e^{-iwT/2} prod_n [...]^{-1}      target 1 / (2i sin(wT/2))

#include <array>
#include <string>
#include <vector>

#include "pathint/parallel.hpp"
#include "pathint/types.hpp"

namespace pathint::scan {

enum class Variant { Product, Inverse };

struct ScanConfig {
  double omega = 1.0;
  double total_time = kPi / 2.0;
  double lambda = 1.0;
  std::vector<double> taus = geometric_schedule(0.1, 0.5, 8);
  double tail_tolerance = 1e-13;
  long max_cutoff = 50'000'000;
  Variant variant = Variant::Inverse;
  bool vacuum_factor = false;

  static std::vector<double> geometric_schedule(double tau0, double ratio, int steps);
  /// Throws InvalidArgument on non-positive lambda, T, tolerances or budget.
  void validate() const;
};

/// log prod_n [1 - z_n] with the cutoff that met the tail tolerance.
struct LogProduct {
  cplx log_value;
  long cutoff;
  double tail_bound;  ///< bound on sum_{|n| > cutoff} |log(1 - z_n)|
};

/// Throws InvalidArgument when Re(tau^3) <= 0, SingularConfiguration when
/// the n = 0 factor vanishes (tau omega = 2 pi k), NonConvergence when the
/// cutoff budget runs out.
LogProduct regularized_log_product(const ScanConfig& cfg, cplx tau);

struct ProductValue {
  cplx value;
  long cutoff;
  double tail_bound;
};

/// F(tau) for cfg.variant / cfg.vacuum_factor.
ProductValue regularized_product(const ScanConfig& cfg, cplx tau);

cplx variant_value(cplx log_product, Variant variant, bool vacuum_factor, double omega, double total_time);
cplx variant_target(Variant variant, bool vacuum_factor, double omega, double total_time);
std::string variant_label(Variant variant, bool vacuum_factor);

/// prod_n [1 - exp(i eps (omega_n - omega))]^{-1} over the N grid modes
/// (eps~ = 0, tau = eps) and its exact value e^{iwT/2} / (2i sin(wT/2)).
struct FiniteProduct {
  cplx value;
  cplx exact;
  double abs_diff() const { return std::abs(value - exact); }
};
FiniteProduct finite_product(int slices, double omega, double total_time);

inline constexpr int kVariantCount = 4;

struct ScanRow {
  double tau;
  long cutoff;
  double tail_bound;
  std::array<cplx, kVariantCount> values;
  std::array<double, kVariantCount> errors;
};

struct ScanResult {
  std::array<std::string, kVariantCount> labels;
  std::array<cplx, kVariantCount> targets;
  std::vector<ScanRow> rows;
  /// Per variant: error strictly decreasing over the last `trend_steps` steps.
  std::array<bool, kVariantCount> monotone_tail;
  int trend_steps;
  int best_variant;  ///< variant with the smallest final error among monotone ones (or overall)
  double best_error;
  bool supported;    ///< some variant is monotone and ends below the error threshold
  double error_threshold;
};

/// Runs the schedule (strictly decreasing tau) for all four variants.
ScanResult conjecture_scan(const ScanConfig& cfg, int trend_steps = 4, double error_threshold = 5e-3,
                           const Parallel& par = {});

struct ProbeRow {
  cplx tau;
  cplx value;
  long cutoff;
  double tail_bound;
};

/// Evaluates F at complex samples; every sample needs Re(tau^3) > 0.
std::vector<ProbeRow> analyticity_probe(const ScanConfig& cfg, const std::vector<cplx>& samples);

/// |d_y F - i d_x F| / |d_x F| from the 2 x 2 square {tau0, tau0 + h, tau0 + ih,
/// tau0 + h + ih}. Small for an analytic F.
double cauchy_riemann_residual(const ScanConfig& cfg, cplx tau0, double h);

}  // namespace pathint::scan
