#include "pathint/extended_space.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "pathint/canonical_oracle.hpp"
#include "pathint/errors.hpp"

namespace pathint {
namespace {

using RowMajor = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

bool is_identity(const CMatrix& m) { return m.isIdentity(0.0); }

void check_index(int index, int dim, const char* what) {
  if (index < 0 || index >= dim) {
    std::ostringstream msg;
    msg << what << ": basis index " << index << " outside [0, " << dim << ")";
    throw InvalidArgument(msg.str());
  }
}

/// Per-slice operators W_t with the insertions folded in: W_t = U_t O^(t).
std::vector<SliceOperator> folded_steps(const ActionSpec& spec, const InsertionList& insertions) {
  insertions.validate(spec.slices(), spec.slice_dim());
  std::vector<SliceOperator> w(spec.step_ops().begin(), spec.step_ops().end());
  for (const auto& ins : insertions.items()) w[ins.slice] = w[ins.slice] * ins.op;
  return w;
}

ExtendedState apply_steps(std::span<const SliceOperator> steps, const ExtendedState& state,
                          const kernels::Table& k) {
  return apply_time_shift(apply_slicewise(state, steps, k), +1);
}

// ---------------------------------------------------------------------------
// Path-sum enumeration over trajectories x_0 .. x_{N-1} (bra slot 0 = x_N).
//
// Only nonzero slice matrix elements are followed, so banded or diagonal
// steps (Fock oscillators) enumerate only the contributing trajectories.

struct SparseColumns {
  // entries[t][col] = list of (row, W_t(row, col)) with W_t(row, col) != 0
  std::vector<std::vector<std::vector<std::pair<int, cplx>>>> entries;
  std::vector<CMatrix> dense;
};

SparseColumns sparse_columns(std::span<const SliceOperator> steps) {
  SparseColumns s;
  for (const auto& op : steps) {
    const CMatrix& w = op.matrix();
    std::vector<std::vector<std::pair<int, cplx>>> cols(w.cols());
    for (Eigen::Index c = 0; c < w.cols(); ++c)
      for (Eigen::Index r = 0; r < w.rows(); ++r)
        if (w(r, c) != cplx{}) cols[c].emplace_back(static_cast<int>(r), w(r, c));
    s.entries.push_back(std::move(cols));
    s.dense.push_back(w);
  }
  return s;
}

// Sum over x_{t+1} .. x_{N-1} given x_t, closing on bra value `last`.
cplx path_sum_from(const SparseColumns& s, int t, int x_t, int last) {
  const int n = static_cast<int>(s.dense.size());
  if (t == n - 1) return s.dense[t](last, x_t);
  cplx total{};
  for (const auto& [row, value] : s.entries[t][x_t]) total += value * path_sum_from(s, t + 1, row, last);
  return total;
}

cplx path_sum_boundary(std::span<const SliceOperator> steps, int q_in, int q_out, const Parallel& par) {
  const SparseColumns s = sparse_columns(steps);
  const int n = static_cast<int>(steps.size());
  if (n == 1) return s.dense[0](q_out, q_in);
  const auto& first = s.entries[0][q_in];
  return parallel_sum<cplx>(first.size(), par, [&](std::size_t b, std::size_t e) {
    cplx acc{};
    for (std::size_t i = b; i < e; ++i) acc += first[i].second * path_sum_from(s, 1, first[i].first, q_out);
    return acc;
  });
}

cplx path_sum_trace(std::span<const SliceOperator> steps, const Parallel& par) {
  const SparseColumns s = sparse_columns(steps);
  const int m = steps.front().dim();
  return parallel_sum<cplx>(static_cast<std::size_t>(m), par, [&](std::size_t b, std::size_t e) {
    cplx acc{};
    for (std::size_t x0 = b; x0 < e; ++x0) acc += path_sum_from(s, 0, static_cast<int>(x0), static_cast<int>(x0));
    return acc;
  });
}

// ---------------------------------------------------------------------------
// Matrix-free traces: apply e^{iS} to product basis states.

cplx matrix_free_boundary(std::span<const SliceOperator> steps, int q_in, int q_out, const Parallel& par) {
  const int m = steps.front().dim();
  const int n = static_cast<int>(steps.size());
  const std::size_t rest = ipow(m, n - 1);
  const kernels::Table& k = kernels::active();
  return parallel_sum<cplx>(rest, par, [&](std::size_t b, std::size_t e) {
    ExtendedState basis(m, n);
    cplx acc{};
    for (std::size_t r = b; r < e; ++r) {
      const std::size_t in = static_cast<std::size_t>(q_in) * rest + r;
      basis[in] = 1.0;
      const ExtendedState out = apply_steps(steps, basis, k);
      acc += out[static_cast<std::size_t>(q_out) * rest + r];
      basis[in] = 0.0;
    }
    return acc;
  });
}

cplx matrix_free_trace(std::span<const SliceOperator> steps, const Parallel& par) {
  const int m = steps.front().dim();
  const int n = static_cast<int>(steps.size());
  const std::size_t total = extended_size(m, n);
  const kernels::Table& k = kernels::active();
  return parallel_sum<cplx>(total, par, [&](std::size_t b, std::size_t e) {
    ExtendedState basis(m, n);
    cplx acc{};
    for (std::size_t x = b; x < e; ++x) {
      basis[x] = 1.0;
      acc += apply_steps(steps, basis, k)[x];
      basis[x] = 0.0;
    }
    return acc;
  });
}

bool use_matrix_free(TraceRoute route, int m, int n) {
  switch (route) {
    case TraceRoute::MatrixFree:
      return true;
    case TraceRoute::PathSum:
      return false;
    case TraceRoute::Auto:
      break;
  }
  std::size_t size = 1;
  for (int t = 0; t < n; ++t) {
    size *= static_cast<std::size_t>(m);
    if (size > kMatrixFreeTraceLimit) return false;
  }
  return true;
}

cplx boundary_trace(std::span<const SliceOperator> steps, int q_in, int q_out, const Parallel& par,
                    TraceRoute route = TraceRoute::Auto) {
  const int m = steps.front().dim();
  check_index(q_in, m, "trace");
  check_index(q_out, m, "trace");
  if (use_matrix_free(route, m, static_cast<int>(steps.size())))
    return matrix_free_boundary(steps, q_in, q_out, par);
  return path_sum_boundary(steps, q_in, q_out, par);
}

}  // namespace

std::size_t extended_size(int slice_dim, int slices) {
  if (slice_dim < 1 || slices < 1) throw InvalidArgument("extended space needs M >= 1 and N >= 1");
  std::size_t size = 1;
  for (int t = 0; t < slices; ++t) {
    size *= static_cast<std::size_t>(slice_dim);
    if (size > kMaxExtendedSize) {
      std::ostringstream msg;
      msg << "extended space " << slice_dim << "^" << slices << " exceeds the amplitude budget of "
          << kMaxExtendedSize;
      throw SizeGuardExceeded(msg.str());
    }
  }
  return size;
}

// ---------------------------------------------------------------------------
// ExtendedState

ExtendedState::ExtendedState(int slice_dim, int slices)
    : dim_(slice_dim), slices_(slices), amps_(extended_size(slice_dim, slices)) {}

ExtendedState ExtendedState::basis(int slice_dim, std::span<const int> digits) {
  ExtendedState s(slice_dim, static_cast<int>(digits.size()));
  s[s.index_of(digits)] = 1.0;
  return s;
}

ExtendedState ExtendedState::product(std::span<const CVector> factors) {
  if (factors.empty()) throw InvalidArgument("ExtendedState::product: no factors");
  const auto m = factors.front().size();
  for (const auto& f : factors)
    if (f.size() != m) throw DimensionMismatch("ExtendedState::product: factors differ in dimension");
  ExtendedState s(static_cast<int>(m), static_cast<int>(factors.size()));
  std::vector<cplx> acc{1.0};
  for (const auto& f : factors) {
    std::vector<cplx> next(acc.size() * m);
    for (std::size_t i = 0; i < acc.size(); ++i)
      for (Eigen::Index j = 0; j < m; ++j) next[i * m + j] = acc[i] * f(j);
    acc = std::move(next);
  }
  std::copy(acc.begin(), acc.end(), s.amps_.begin());
  return s;
}

std::size_t ExtendedState::index_of(std::span<const int> digits) const {
  if (static_cast<int>(digits.size()) != slices_) throw DimensionMismatch("index_of: wrong number of digits");
  std::size_t index = 0;
  for (int d : digits) {
    check_index(d, dim_, "index_of");
    index = index * dim_ + static_cast<std::size_t>(d);
  }
  return index;
}

std::vector<int> ExtendedState::digits_of(std::size_t index) const {
  std::vector<int> digits(slices_);
  for (int t = slices_ - 1; t >= 0; --t) {
    digits[t] = static_cast<int>(index % dim_);
    index /= dim_;
  }
  return digits;
}

double ExtendedState::norm() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// ActionSpec / InsertionList

ActionSpec::ActionSpec(SliceSpace space, std::vector<SliceOperator> step_ops, cplx step)
    : space_(std::move(space)), steps_(std::move(step_ops)), step_(step) {
  if (steps_.empty()) throw InvalidArgument("ActionSpec: need at least one slice");
  for (const auto& op : steps_)
    if (op.dim() != space_.dim()) throw DimensionMismatch("ActionSpec: step operator dimension mismatch");
}

ActionSpec ActionSpec::time_independent(const SliceOperator& hamiltonian, int slices, cplx step) {
  if (slices < 1) throw InvalidArgument("ActionSpec: slices must be >= 1");
  const SliceOperator u = propagator_step(hamiltonian, step);
  return ActionSpec(hamiltonian.space(), std::vector<SliceOperator>(slices, u), step);
}

ActionSpec ActionSpec::piecewise(std::span<const SliceOperator> hamiltonians, cplx step) {
  if (hamiltonians.empty()) throw InvalidArgument("ActionSpec: need at least one slice");
  std::vector<SliceOperator> steps;
  steps.reserve(hamiltonians.size());
  for (const auto& h : hamiltonians) steps.push_back(propagator_step(h, step));
  return ActionSpec(hamiltonians.front().space(), std::move(steps), step);
}

ActionSpec ActionSpec::in_basis(const CMatrix& basis) const {
  if (basis.rows() != slice_dim() || basis.cols() != slice_dim())
    throw DimensionMismatch("ActionSpec::in_basis: basis matrix has the wrong shape");
  std::vector<SliceOperator> steps;
  steps.reserve(steps_.size());
  for (const auto& u : steps_)
    steps.emplace_back(space_, basis.adjoint() * u.matrix() * basis, u.label() + "[basis]");
  return ActionSpec(space_, std::move(steps), step_);
}

ActionSpec ActionSpec::with_identity_slices(int extra) const {
  if (extra < 0) throw InvalidArgument("with_identity_slices: negative count");
  std::vector<SliceOperator> steps = steps_;
  for (int i = 0; i < extra; ++i) steps.push_back(identity_operator(space_));
  return ActionSpec(space_, std::move(steps), step_);
}

InsertionList::InsertionList(std::initializer_list<Insertion> items) {
  for (const auto& it : items) add(it.slice, it.op);
}

void InsertionList::add(int slice, SliceOperator op) {
  for (const auto& it : items_)
    if (it.slice == slice) {
      std::ostringstream msg;
      msg << "InsertionList: duplicate insertion at slice " << slice;
      throw InvalidArgument(msg.str());
    }
  items_.push_back(Insertion{slice, std::move(op)});
}

void InsertionList::validate(int slices, int slice_dim) const {
  for (const auto& it : items_) {
    if (it.slice < 0 || it.slice >= slices) {
      std::ostringstream msg;
      msg << "InsertionList: slice " << it.slice << " outside [0, " << slices << ")";
      throw InvalidArgument(msg.str());
    }
    if (it.op.dim() != slice_dim) throw DimensionMismatch("InsertionList: operator dimension mismatch");
  }
}

// ---------------------------------------------------------------------------
// Matrix-free application

ExtendedState apply_time_shift(const ExtendedState& state, int direction) {
  if (direction != 1 && direction != -1) throw InvalidArgument("apply_time_shift: direction must be +1 or -1");
  const int n = state.slices();
  if (n == 1) return state;
  const std::size_t m = static_cast<std::size_t>(state.slice_dim());
  const std::size_t high = state.size() / m;  // M^(N-1)
  ExtendedState out(state.slice_dim(), n);
  auto src = state.amplitudes();
  auto dst = out.amplitudes();
  // As an (M^(N-1) x M) row-major matrix, the forward shift is a transpose:
  // the last digit moves to the front.
  if (direction == 1) {
    for (std::size_t h = 0; h < high; ++h)
      for (std::size_t c = 0; c < m; ++c) dst[c * high + h] = src[h * m + c];
  } else {
    for (std::size_t c = 0; c < m; ++c)
      for (std::size_t h = 0; h < high; ++h) dst[h * m + c] = src[c * high + h];
  }
  return out;
}

ExtendedState apply_slicewise(const ExtendedState& state, std::span<const SliceOperator> ops,
                              const kernels::Table& k) {
  const int n = state.slices();
  const int m = state.slice_dim();
  if (static_cast<int>(ops.size()) != n) {
    std::ostringstream msg;
    msg << "apply_slicewise: " << ops.size() << " operators for " << n << " slices";
    throw DimensionMismatch(msg.str());
  }
  for (const auto& op : ops)
    if (op.dim() != m) throw DimensionMismatch("apply_slicewise: operator dimension does not match the slice space");

  ExtendedState cur = state;
  ExtendedState next(m, n);
  const std::size_t mm = static_cast<std::size_t>(m);
  for (int t = 0; t < n; ++t) {
    if (is_identity(ops[t].matrix())) continue;
    const RowMajor a = ops[t].matrix();
    const std::size_t inner = ipow(mm, n - 1 - t);
    const std::size_t outer = ipow(mm, t);
    const std::size_t block = mm * inner;
    const cplx* in = cur.amplitudes().data();
    cplx* out = next.amplitudes().data();
    for (std::size_t o = 0; o < outer; ++o) kernels::apply_block(k, a.data(), mm, in + o * block, out + o * block, inner);
    std::swap(cur, next);
  }
  return cur;
}

ExtendedState apply_action(const ActionSpec& spec, const ExtendedState& state, const kernels::Table& k) {
  if (state.slice_dim() != spec.slice_dim() || state.slices() != spec.slices())
    throw DimensionMismatch("apply_action: state and action have different shapes");
  return apply_steps(spec.step_ops(), state, k);
}

// ---------------------------------------------------------------------------
// Traces

cplx propagator_via_trace(const ActionSpec& spec, int q_in, int q_out, const Parallel& par) {
  return boundary_trace(spec.step_ops(), q_in, q_out, par);
}

cplx full_trace(const ActionSpec& spec, const InsertionList& insertions, TraceRoute route, const Parallel& par) {
  const auto steps = folded_steps(spec, insertions);
  if (use_matrix_free(route, spec.slice_dim(), spec.slices())) {
    extended_size(spec.slice_dim(), spec.slices());
    return matrix_free_trace(steps, par);
  }
  return path_sum_trace(steps, par);
}

cplx correlator_via_trace(const ActionSpec& spec, const InsertionList& insertions, int q_in, int q_out,
                          const Parallel& par) {
  const auto steps = folded_steps(spec, insertions);
  return boundary_trace(steps, q_in, q_out, par);
}

SliceOperator partial_trace_action(const ActionSpec& spec, const Parallel& par) {
  const int m = spec.slice_dim();
  const int n = spec.slices();
  CMatrix r = CMatrix::Zero(m, m);
  if (use_matrix_free(TraceRoute::Auto, m, n)) {
    const std::size_t rest = ipow(m, n - 1);
    const kernels::Table& k = kernels::active();
    parallel_for(static_cast<std::size_t>(m), par, [&](std::size_t q) {
      ExtendedState basis(m, n);
      for (std::size_t b = 0; b < rest; ++b) {
        const std::size_t in = q * rest + b;
        basis[in] = 1.0;
        const ExtendedState out = apply_action(spec, basis, k);
        for (int qp = 0; qp < m; ++qp) r(qp, static_cast<Eigen::Index>(q)) += out[static_cast<std::size_t>(qp) * rest + b];
        basis[in] = 0.0;
      }
    });
  } else {
    for (int q = 0; q < m; ++q)
      for (int qp = 0; qp < m; ++qp) r(qp, q) = path_sum_boundary(spec.step_ops(), q, qp, par);
  }
  return SliceOperator(spec.space(), std::move(r), "Tr_{t!=0}[e^{iS}]");
}

// ---------------------------------------------------------------------------
// Identity checks

ComplexPair verify_legendre_phase(const SliceSpace& space, std::span<const int> q_indices,
                                  std::span<const int> p_indices) {
  if (!space.is_grid()) throw InvalidArgument("verify_legendre_phase: requires a position grid");
  const int n = static_cast<int>(q_indices.size());
  if (n < 1 || static_cast<int>(p_indices.size()) != n)
    throw DimensionMismatch("verify_legendre_phase: q and p multi-indices must have equal nonzero length");
  const int m = space.dim();
  for (int t = 0; t < n; ++t) {
    check_index(q_indices[t], m, "verify_legendre_phase");
    check_index(p_indices[t], m, "verify_legendre_phase");
  }

  const CMatrix f = dft_momentum_basis(space).matrix();
  std::vector<CVector> waves;
  for (int t = 0; t < n; ++t) waves.push_back(f.col(p_indices[t]));
  const ExtendedState shifted = apply_time_shift(ExtendedState::product(waves), +1);
  const cplx lhs = shifted[shifted.index_of(q_indices)];

  // rhs from the closed-form plane waves, not the DFT matrix.
  double overlap_phase = 0.0;
  double legendre_phase = 0.0;
  for (int t = 0; t < n; ++t) {
    const double p = space.momentum(p_indices[t]);
    const double q = space.position(q_indices[t]);
    const double q_next = space.position(q_indices[(t + 1) % n]);
    overlap_phase += p * q;
    legendre_phase += p * (q_next - q);
  }
  const cplx overlap = std::polar(std::pow(static_cast<double>(m), -0.5 * n), overlap_phase);
  const cplx rhs = std::polar(1.0, legendre_phase) * overlap;
  return {lhs, rhs};
}

ComplexPair verify_discrete_schrodinger(const ActionSpec& spec, const SliceOperator& hamiltonian, int q_in,
                                        int q_out) {
  if (spec.wick()) throw InvalidArgument("verify_discrete_schrodinger: needs a real time step");
  const double eps = spec.step().real();
  const int n = spec.slices();
  // H' = H (x) h_N: e^{iS} carries an identity on slice N, e^{iS'} one more step.
  const ActionSpec base = spec.with_identity_slices(1);
  std::vector<SliceOperator> steps(spec.step_ops().begin(), spec.step_ops().end());
  steps.push_back(spec.step_ops().back());
  const ActionSpec longer(spec.space(), std::move(steps), spec.step());
  const cplx lhs = propagator_via_trace(longer, q_in, q_out) - propagator_via_trace(base, q_in, q_out);

  const auto schedule = oracle::EvolutionSchedule::constant(hamiltonian, n * eps);
  const CMatrix u_t = oracle::evolve(schedule, n * eps).matrix();
  const CMatrix step =
      oracle::evolve(oracle::EvolutionSchedule::constant(hamiltonian, eps), eps).matrix();
  const CMatrix diff = step - CMatrix::Identity(step.rows(), step.cols());
  const cplx rhs = (u_t * diff)(q_out, q_in);
  return {lhs, rhs};
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("loglog_slope: need >= 2 paired samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidArgument("loglog_slope: samples must be positive");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

TrotterTable trotter_order_experiment(const SliceSpace& space, const std::function<double(double)>& potential,
                                      double mass, double total_time, std::span<const double> eps_list,
                                      std::span<const std::pair<int, int>> pairs) {
  if (!(total_time > 0.0)) throw InvalidArgument("trotter_order_experiment: total time must be positive");
  const SliceOperator k = kinetic_operator(space, mass);
  const SliceOperator v = potential_operator(space, potential);
  const SliceOperator h(space, k.matrix() + v.matrix(), "H");
  const CMatrix exact = propagator_step(h, total_time).matrix();

  std::vector<std::pair<int, int>> sample(pairs.begin(), pairs.end());
  if (sample.empty())
    for (int a = 0; a < space.dim(); ++a)
      for (int b = 0; b < space.dim(); ++b) sample.emplace_back(a, b);
  for (const auto& [qi, qo] : sample) {
    check_index(qi, space.dim(), "trotter_order_experiment");
    check_index(qo, space.dim(), "trotter_order_experiment");
  }

  TrotterTable table;
  std::vector<double> xs, ys;
  for (double eps : eps_list) {
    const double steps_real = total_time / eps;
    const int steps = static_cast<int>(std::llround(steps_real));
    if (steps < 1 || std::abs(steps_real - steps) > 1e-9 * steps_real) {
      std::ostringstream msg;
      msg << "trotter_order_experiment: T / eps = " << steps_real << " is not an integer";
      throw InvalidArgument(msg.str());
    }
    CMatrix split = propagator_step(v, eps).matrix() * propagator_step(k, eps).matrix();
    CMatrix power = CMatrix::Identity(space.dim(), space.dim());
    for (int e = steps; e > 0; e >>= 1) {
      if (e & 1) power = split * power;
      split = (split * split).eval();
    }
    double err = 0.0;
    for (const auto& [qi, qo] : sample) err = std::max(err, std::abs(power(qo, qi) - exact(qo, qi)));
    table.rows.push_back({eps, steps, err});
    xs.push_back(eps);
    ys.push_back(std::max(err, 1e-300));
  }
  table.slope = xs.size() >= 2 ? loglog_slope(xs, ys) : 0.0;
  return table;
}

}  // namespace pathint
