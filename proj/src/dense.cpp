#include "pathint/dense.hpp"

#include <sstream>

#include "pathint/errors.hpp"

namespace pathint::dense {

CMatrix kron(std::span<const CMatrix> factors) {
  if (factors.empty()) throw InvalidArgument("kron: no factors");
  CMatrix acc = CMatrix::Ones(1, 1);
  for (const auto& f : factors) {
    CMatrix next(acc.rows() * f.rows(), acc.cols() * f.cols());
    for (Eigen::Index i = 0; i < acc.rows(); ++i)
      for (Eigen::Index j = 0; j < acc.cols(); ++j)
        next.block(i * f.rows(), j * f.cols(), f.rows(), f.cols()) = acc(i, j) * f;
    acc = std::move(next);
  }
  return acc;
}

CMatrix time_shift(int slice_dim, int slices, int direction) {
  const std::size_t size = extended_size(slice_dim, slices);
  if (size > kDenseLimit) throw SizeGuardExceeded("dense time shift: M^N exceeds the dense limit");
  CMatrix p = CMatrix::Zero(size, size);
  ExtendedState basis(slice_dim, slices);
  for (std::size_t x = 0; x < size; ++x) {
    basis[x] = 1.0;
    const ExtendedState out = apply_time_shift(basis, direction);
    basis[x] = 0.0;
    for (std::size_t y = 0; y < size; ++y)
      if (out[y] != cplx{}) p(y, x) = out[y];
  }
  return p;
}

CMatrix embed(const CMatrix& op, int slice, int slices) {
  if (slice < 0 || slice >= slices) throw InvalidArgument("embed: slice out of range");
  std::vector<CMatrix> factors(slices, CMatrix::Identity(op.rows(), op.cols()));
  factors[slice] = op;
  return kron(factors);
}

CMatrix action(const ActionSpec& spec) {
  if (extended_size(spec.slice_dim(), spec.slices()) > kDenseLimit)
    throw SizeGuardExceeded("dense action: M^N exceeds the dense limit");
  std::vector<CMatrix> factors;
  for (const auto& u : spec.step_ops()) factors.push_back(u.matrix());
  return time_shift(spec.slice_dim(), spec.slices(), +1) * kron(factors);
}

}  // namespace pathint::dense

namespace pathint {

double verify_interleaving_identity(const ActionSpec& spec) {
  const std::size_t size = extended_size(spec.slice_dim(), spec.slices());
  if (size > kDenseLimit) {
    std::ostringstream msg;
    msg << "verify_interleaving_identity: M^N = " << size << " exceeds " << kDenseLimit;
    throw SizeGuardExceeded(msg.str());
  }
  const int m = spec.slice_dim();
  const int n = spec.slices();
  const CMatrix es = dense::action(spec);

  // U(t eps) = U_{t-1} ... U_0, U(0) = 1.
  std::vector<CMatrix> forward, backward;
  CMatrix u = CMatrix::Identity(m, m);
  for (int t = 0; t < n; ++t) {
    forward.push_back(u);
    backward.push_back(u.adjoint());
    u = spec.step_ops()[t].matrix() * u;
  }
  const CMatrix v_dag = dense::kron(forward);
  const CMatrix v = dense::kron(backward);
  const CMatrix u0_total = dense::embed(u, 0, n);
  const CMatrix rebuilt = u0_total * v_dag * dense::time_shift(m, n, +1) * v;
  return (es - rebuilt).norm() / es.norm();
}

}  // namespace pathint
