#pragma once

// Closed forms for the harmonic oscillator in the tensor-product-in-time
// picture: mode products, the one-body mixing matrix, Green function, driven
// oscillator generating functional and the Feynman propagator.
//
// Mode conventions:
//   omega_n = 2 pi n / T
//   N grid modes: n = -floor(N/2) .. floor((N-1)/2), so omega_n eps = 2 pi n / N
//   j_n = T^{-1/2} int_0^T dt exp(i omega_n t) j(t)

#include <functional>
#include <vector>

#include "pathint/types.hpp"

namespace pathint::osc {

/// Default exclusion radius around omega = omega_n.
inline constexpr double kResonanceRadius = 1e-6;
/// Default guard on |sin(omega T / 2)|.
inline constexpr double kPoleGuard = 1e-8;

struct ModeSpectrum {
  double total_time;
  std::vector<int> modes;

  /// n = -K .. K.
  static ModeSpectrum symmetric(double total_time, int cutoff);
  /// The N grid modes of an N-slice discretization.
  static ModeSpectrum grid(double total_time, int slices);

  double frequency(int n) const;
};

/// Grid mode labels for N slices.
std::vector<int> grid_modes(int slices);

// ---------------------------------------------------------------------------
// Mode products and determinants

/// prod_n (1 - exp(i tau (omega_n - omega))) over the N grid modes, T = N eps.
cplx mode_product(int slices, double eps, double tau, cplx omega);

/// exp(-i omega T/2) prod_n (1 - exp(i eps (omega_n - omega)))^{-1}; equals
/// 1 / (2i sin(omega T/2)). Complex omega is allowed (damped contour).
/// Throws SingularConfiguration when |sin(omega T/2)| < pole_guard.
cplx mode_partition_product(int slices, double eps, cplx omega, double pole_guard = kPoleGuard);

/// 1 / (2i sin(omega T / 2)).
cplx partition_closed_form(double total_time, cplx omega);

enum class MatrixOrigin { Shift, Action, Mixing, ReducedMixing };

/// N x N matrix acting on the creation-operator labels A^dagger_t.
struct OneBodyMatrix {
  CMatrix matrix;
  MatrixOrigin origin;
};

const char* origin_name(MatrixOrigin origin);

/// C with C(t+1, t) = 1: the shift sends A^dagger_t to A^dagger_{t+1}.
OneBodyMatrix shift_one_body(int slices);

/// exp(-i omega eps) C: the one-body image of e^{iS} for H = omega(n + 1/2).
OneBodyMatrix action_one_body(int slices, double eps, double omega);

/// M(tau) = 1 - F^dagger diag(exp(i tau (omega_n - omega))) F with
/// F(n, t) = exp(i omega_n t eps) / sqrt(N).
OneBodyMatrix mixing_matrix(int slices, double eps, double tau, double omega);

/// M-bar: first row and column removed.
OneBodyMatrix reduced(const OneBodyMatrix& m);

cplx determinant(const OneBodyMatrix& m);

/// exp(-i omega T/2) / det M-bar(eps). Throws SingularConfiguration on a
/// vanishing determinant.
cplx vacuum_persistence_det(int slices, double eps, double omega);

/// max_t || A^dagger_t - e^{iS} A^dagger_t e^{-iS} - sum_t' M(t', t) A^dagger_t' ||_F
/// on a Fock extended space of truncation d, with dense e^{iS} at tau = eps.
double mixing_identity_residual(int slices, double eps, double omega, int truncation);

// ---------------------------------------------------------------------------
// Green function

struct GreenOptions {
  bool exclude_zero_mode = false;
  double resonance_radius = kResonanceRadius;
};

/// Partial sum with cutoff K and the same sum at 2K.
struct SeriesValue {
  cplx value;
  cplx doubled;
  double change() const { return std::abs(doubled - value); }
};

/// G(delta) = sum_{|n| <= K} i exp(-i omega_n delta) / [T (omega_n^2 - omega^2)],
/// summed in (+n, -n) pairs.
SeriesValue green_function(double total_time, double omega, int cutoff, double delta, const GreenOptions& opt = {});

/// (D^2 + omega^2) G_K(delta) + i delta_K(delta) with D^2 the second central
/// difference of step eps and delta_K the truncated periodic delta. O(eps^2)
/// at fixed K.
cplx green_lattice_residual(double total_time, double omega, int cutoff, double delta, double eps);

/// (i T / 2)(x^2 - x + 1/6), x = delta/T in [0, 1]: the omega = 0,
/// zero-mode-excluded Green function.
cplx green_zero_frequency_closed(double total_time, double delta);

// ---------------------------------------------------------------------------
// Driven oscillator

/// Real source j(t) on [0, T] for H = p^2/2m + m omega^2 q^2/2 - sqrt(m) j q.
///
/// A profile is sampled at slice midpoints; explicit samples are taken as a
/// piecewise-constant source. Fourier coefficients are exact for the
/// piecewise-constant function actually simulated.
struct SourceSpec {
  double total_time = 1.0;
  double mass = 1.0;
  double omega = 1.0;
  std::function<double(double)> profile;
  std::vector<double> samples;

  static SourceSpec from_profile(double total_time, double mass, double omega, std::function<double(double)> j);
  static SourceSpec from_samples(double total_time, double mass, double omega, std::vector<double> samples);
  /// amplitude * cos(omega_n t).
  static SourceSpec single_mode(double total_time, double mass, double omega, double amplitude, int mode);
  static SourceSpec zero(double total_time, double mass, double omega);

  /// Piecewise-constant values on N slices. Explicit samples must divide N.
  std::vector<double> slice_values(int slices) const;
  /// j_n of the N-slice piecewise-constant source.
  cplx fourier(int n, int slices) const;
};

/// S_cl = (1/2) sum_{|n| <= K} c^3 j_{-n} j_n / (c^2 omega^2 - omega_n^2)
/// on the contour t -> c t. c = 1 is the real-time action.
cplx classical_action_of_source(const SourceSpec& src, int cutoff, int slices, cplx contour = 1.0);

struct GeneratingFunctionalOptions {
  int truncation = 40;   ///< Fock truncation d (the sweep also runs 2d)
  int slices = 256;      ///< N (the sweep also runs 2N)
  double eta = 0.25;     ///< contour c = 1 - i eta
  int mode_factor = 40;  ///< mode cutoff K = mode_factor * N
  double sweep_tolerance = 1e-6;
};

struct GeneratingFunctionalResult {
  cplx z;                   ///< Tr[U_j(T)] / Tr[U_0(T)] at (d, N)
  cplx z_truncation;        ///< same at (2d, N)
  cplx z_slices;            ///< same at (d, 2N)
  double truncation_change; ///< |z - z_truncation|
  double slicing_change;    ///< |z - z_slices|
  bool converged;           ///< both changes below sweep_tolerance
  cplx action;              ///< S_cl on the contour, K = mode_factor * N
  cplx target;              ///< exp(i action)
  double relative_error;    ///< |z - target| / |target|
  double real_time_action;  ///< S_cl at c = 1 (real for a real source)
};

/// Trace ratio of the piecewise-constant driven evolution in truncated Fock
/// space along t -> (1 - i eta) t, where the truncated traces converge.
GeneratingFunctionalResult generating_functional_discrete(const SourceSpec& src,
                                                          const GeneratingFunctionalOptions& opt = {});

struct SourceShiftTable {
  double tau;
  std::vector<int> modes;
  std::vector<cplx> displacements;    ///< j_n / [sqrt(2 omega tau) (omega_n - omega)]
  double partial_fraction_residual;  ///< max residual over the modes, relative to the larger fraction
  cplx action;                        ///< -tau sum_n (omega_n - omega) |d_n|^2
};

/// Per-mode displacement A_n -> A_n + d_n of the unitary source shift.
SourceShiftTable source_shift_transform(const SourceSpec& src, int cutoff, int slices, double tau);

// ---------------------------------------------------------------------------
// Feynman propagator

/// exp(-i omega |dt|) / (2 omega) for the sqrt(m)-normalised coordinate.
cplx feynman_propagator_closed(double omega, double dt);

/// m <0| T[q(t) q(t')] |0> from the canonical oracle in a Fock truncation d.
cplx feynman_propagator_oracle(double omega, double dt, int truncation, double mass = 1.0);

struct FrequencyIntegral {
  cplx value;         ///< at eta
  cplx value_half;    ///< at eta / 2
  cplx extrapolated;  ///< 2 value_half - value
  double eta_change;  ///< |value - value_half|
  double tail_bound;  ///< 1 / (pi Lambda): size of the dropped |w| > Lambda tails
};

/// (i / 2 pi) int_{-Lambda}^{Lambda} dw exp(-i w dt) / (w^2 - omega^2 + i eta)
/// by adaptive Gauss-Kronrod quadrature. Throws NonConvergence when the
/// quadrature error estimate exceeds 1e-6.
FrequencyIntegral frequency_integral_DF(double omega, double dt, double eta, double cutoff);

}  // namespace pathint::osc
