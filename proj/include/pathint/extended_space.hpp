#pragma once

// Tensor-product-in-time Hilbert space H = (x)_t h_t for N slices.
//
// Multi-index layout (fixed project wide): slice t = 0 is the most
// significant digit,
//   index(i_0, ..., i_{N-1}) = sum_t i_t M^(N-1-t).
// The cyclic time shift e^{i P_t eps} maps |x_0 x_1 ... x_{N-1}> to
// |x_{N-1} x_0 ... x_{N-2}>, so its matrix elements between trajectory
// states are <x'| e^{iS} |x> = prod_t <x'_{t+1} | U_t | x_t> with x'_N = x'_0.
// Slice N is identified with slice 0; there is no separate final slot.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pathint/kernels.hpp"
#include "pathint/parallel.hpp"
#include "pathint/slice_space.hpp"
#include "pathint/types.hpp"

namespace pathint {

/// Upper bound on M^N for any dense amplitude buffer.
inline constexpr std::size_t kMaxExtendedSize = std::size_t{1} << 26;

/// M^N with overflow and budget checks.
std::size_t extended_size(int slice_dim, int slices);

class ExtendedState {
 public:
  ExtendedState(int slice_dim, int slices);

  static ExtendedState basis(int slice_dim, std::span<const int> digits);
  /// (x)_t factors[t]; all factors must share one dimension.
  static ExtendedState product(std::span<const CVector> factors);

  int slice_dim() const { return dim_; }
  int slices() const { return slices_; }
  std::size_t size() const { return amps_.size(); }

  std::span<cplx> amplitudes() { return amps_; }
  std::span<const cplx> amplitudes() const { return amps_; }
  cplx& operator[](std::size_t i) { return amps_[i]; }
  const cplx& operator[](std::size_t i) const { return amps_[i]; }

  std::size_t index_of(std::span<const int> digits) const;
  std::vector<int> digits_of(std::size_t index) const;

  double norm() const;

 private:
  int dim_;
  int slices_;
  std::vector<cplx> amps_;
};

/// Data defining e^{iS}: N per-slice step propagators U_t[(t+1)eps, t eps].
class ActionSpec {
 public:
  ActionSpec(SliceSpace space, std::vector<SliceOperator> step_ops, cplx step);

  /// Same exp(-i H dt) on every slice; dt = step (complex for Wick rotation).
  static ActionSpec time_independent(const SliceOperator& hamiltonian, int slices, cplx step);
  /// One Hamiltonian per slice (piecewise-constant H(t)).
  static ActionSpec piecewise(std::span<const SliceOperator> hamiltonians, cplx step);

  const SliceSpace& space() const { return space_; }
  int slice_dim() const { return space_.dim(); }
  int slices() const { return static_cast<int>(steps_.size()); }
  cplx step() const { return step_; }
  /// True when the step is not real (Wick-rotated or tilted contour).
  bool wick() const { return step_.imag() != 0.0; }
  std::span<const SliceOperator> step_ops() const { return steps_; }

  /// Same action with every step written in another single-slice basis:
  /// U_t -> B^dagger U_t B for a unitary B whose columns are the new basis.
  ActionSpec in_basis(const CMatrix& basis) const;

  /// Action on H' = H (x) h_N with extra identity slices appended.
  ActionSpec with_identity_slices(int extra) const;

 private:
  SliceSpace space_;
  std::vector<SliceOperator> steps_;
  cplx step_;
};

struct Insertion {
  int slice;
  SliceOperator op;
};

/// Operators inserted at distinct slices, identity elsewhere.
class InsertionList {
 public:
  InsertionList() = default;
  InsertionList(std::initializer_list<Insertion> items);

  /// Throws InvalidArgument on a duplicate slice index.
  void add(int slice, SliceOperator op);
  std::span<const Insertion> items() const { return items_; }
  bool empty() const { return items_.empty(); }

  /// Checks 0 <= t < slices and the operator dimension.
  void validate(int slices, int slice_dim) const;

 private:
  std::vector<Insertion> items_;
};

enum class TraceRoute {
  Auto,        ///< MatrixFree when M^N <= kMatrixFreeTraceLimit, else PathSum
  MatrixFree,  ///< apply e^{iS} to each product basis state
  PathSum,     ///< enumerate trajectories, multiplying slice matrix elements
};

inline constexpr std::size_t kMatrixFreeTraceLimit = 4096;

// ---------------------------------------------------------------------------
// Matrix-free application

ExtendedState apply_time_shift(const ExtendedState& state, int direction);

ExtendedState apply_slicewise(const ExtendedState& state, std::span<const SliceOperator> ops,
                              const kernels::Table& k = kernels::active());

/// e^{iS} |state> = shift(+1) after the per-slice steps.
ExtendedState apply_action(const ActionSpec& spec, const ExtendedState& state,
                           const kernels::Table& k = kernels::active());

// ---------------------------------------------------------------------------
// Traces

/// Tr[e^{iS} |q_in>_0 <q_out|] = sum_b <q_out, b| e^{iS} |q_in, b>.
cplx propagator_via_trace(const ActionSpec& spec, int q_in, int q_out, const Parallel& par = {});

/// Tr_H[e^{iS} (x)'_t O^(t)].
cplx full_trace(const ActionSpec& spec, const InsertionList& insertions, TraceRoute route = TraceRoute::Auto,
                const Parallel& par = {});

/// Tr[e^{iS} (x)'_t O^(t) |q_in>_0 <q_out|].
cplx correlator_via_trace(const ActionSpec& spec, const InsertionList& insertions, int q_in, int q_out,
                          const Parallel& par = {});

/// Tr_{t != 0}[e^{iS}] as an M x M matrix.
SliceOperator partial_trace_action(const ActionSpec& spec, const Parallel& par = {});

// ---------------------------------------------------------------------------
// Identity checks

struct ComplexPair {
  cplx lhs;
  cplx rhs;
  double abs_diff() const { return std::abs(lhs - rhs); }
};

/// lhs = <q| e^{i P_t eps} |p> by shifting the tensor plane wave; rhs =
/// exp(i sum_t p_t (q_{t+1} - q_t)) <q|p> with q_N = q_0. Indices are grid
/// positions and DFT momentum columns.
ComplexPair verify_legendre_phase(const SliceSpace& space, std::span<const int> q_indices,
                                  std::span<const int> p_indices);

/// ||e^{iS} - U_0(T) V^dagger e^{iP eps} V||_F / ||e^{iS}||_F from dense
/// Kronecker assembly. Requires M^N <= kDenseLimit.
double verify_interleaving_identity(const ActionSpec& spec);

inline constexpr std::size_t kDenseLimit = 4096;

/// lhs = <q',T+eps|q> - <q',T|q> from two traces on H (x) h_N; rhs =
/// <q',T| (e^{-iH eps} - 1) |q> from the canonical oracle.
ComplexPair verify_discrete_schrodinger(const ActionSpec& spec, const SliceOperator& hamiltonian, int q_in,
                                        int q_out);

struct TrotterRow {
  double eps;
  int steps;
  double error;
};

struct TrotterTable {
  std::vector<TrotterRow> rows;
  double slope;  ///< least-squares slope of log(error) vs log(eps)
};

/// Split-step propagator exp(-iV eps) exp(-iK eps) to the N = T/eps power vs
/// exact exp(-iHT); error is the max |difference| over the sampled (q, q')
/// pairs (all pairs when `pairs` is empty).
TrotterTable trotter_order_experiment(const SliceSpace& space, const std::function<double(double)>& potential,
                                      double mass, double total_time, std::span<const double> eps_list,
                                      std::span<const std::pair<int, int>> pairs = {});

/// Least-squares slope of log(y) vs log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace pathint
