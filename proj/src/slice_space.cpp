#include "pathint/slice_space.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "pathint/errors.hpp"

namespace pathint {
namespace {

void require_grid(const SliceSpace& space, const char* what) {
  if (!space.is_grid()) throw InvalidArgument(std::string(what) + ": requires a position grid");
}

void require_fock(const SliceSpace& space, const char* what) {
  if (space.kind() != SliceKind::FockTruncation)
    throw InvalidArgument(std::string(what) + ": requires a Fock truncation");
}

}  // namespace

SliceSpace SliceSpace::position_grid(int dim, double spacing, double q_min) {
  if (dim < 2) throw InvalidArgument("SliceSpace: dim must be >= 2");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw InvalidArgument("SliceSpace: grid spacing must be positive");
  if (!std::isfinite(q_min)) throw InvalidArgument("SliceSpace: q_min must be finite");
  SliceSpace s;
  s.kind_ = SliceKind::PositionGrid;
  s.dim_ = dim;
  s.spacing_ = spacing;
  s.q_min_ = q_min;
  return s;
}

SliceSpace SliceSpace::centered_grid(int dim, double length) {
  if (!(length > 0.0)) throw InvalidArgument("SliceSpace: grid length must be positive");
  return position_grid(dim, length / dim, -0.5 * length);
}

SliceSpace SliceSpace::fock(int dim, double mass, double omega) {
  if (dim < 2) throw InvalidArgument("SliceSpace: dim must be >= 2");
  if (!(mass > 0.0) || !(omega > 0.0)) throw InvalidArgument("SliceSpace: Fock mass and frequency must be positive");
  SliceSpace s;
  s.kind_ = SliceKind::FockTruncation;
  s.dim_ = dim;
  s.mass_ = mass;
  s.omega_ = omega;
  return s;
}

double SliceSpace::momentum(int column) const {
  const int k = column - dim_ / 2;
  return 2.0 * kPi * k / (dim_ * spacing_);
}

std::vector<double> SliceSpace::positions() const {
  std::vector<double> q(dim_);
  for (int j = 0; j < dim_; ++j) q[j] = position(j);
  return q;
}

std::vector<double> SliceSpace::momenta() const {
  std::vector<double> p(dim_);
  for (int c = 0; c < dim_; ++c) p[c] = momentum(c);
  return p;
}

SliceOperator::SliceOperator(SliceSpace space, CMatrix matrix, std::string label)
    : space_(std::move(space)), matrix_(std::move(matrix)), label_(std::move(label)) {
  if (matrix_.rows() != space_.dim() || matrix_.cols() != space_.dim()) {
    std::ostringstream msg;
    msg << "SliceOperator '" << label_ << "': matrix is " << matrix_.rows() << "x" << matrix_.cols()
        << ", space dimension is " << space_.dim();
    throw DimensionMismatch(msg.str());
  }
}

double SliceOperator::hermiticity_defect() const {
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

double SliceOperator::unitarity_defect() const {
  const CMatrix g = matrix_.adjoint() * matrix_;
  return (g - CMatrix::Identity(dim(), dim())).cwiseAbs().maxCoeff();
}

SliceOperator SliceOperator::adjoint() const {
  return SliceOperator(space_, matrix_.adjoint(), label_ + "^dagger");
}

SliceOperator SliceOperator::operator*(const SliceOperator& rhs) const {
  if (!(rhs.space_ == space_)) throw DimensionMismatch("SliceOperator product: spaces differ");
  return SliceOperator(space_, matrix_ * rhs.matrix_, label_ + "*" + rhs.label_);
}

SliceOperator identity_operator(const SliceSpace& space) {
  return SliceOperator(space, CMatrix::Identity(space.dim(), space.dim()), "1");
}

CMatrix centered_dft_matrix(int dim, double spacing, double q_min) {
  if (dim < 1) throw InvalidArgument("centered_dft_matrix: dim must be >= 1");
  CMatrix f(dim, dim);
  const double norm = 1.0 / std::sqrt(static_cast<double>(dim));
  for (int c = 0; c < dim; ++c) {
    const int k = c - dim / 2;
    const double p = 2.0 * kPi * k / (dim * spacing);
    for (int j = 0; j < dim; ++j) {
      // p q_j = 2 pi k j / M + p q_min; the integer part of k j / M is dropped exactly.
      const double turns = static_cast<double>((static_cast<long long>(k) * j) % dim) / dim;
      f(j, c) = std::polar(norm, 2.0 * kPi * turns + p * q_min);
    }
  }
  return f;
}

SliceOperator dft_momentum_basis(const SliceSpace& space) {
  require_grid(space, "dft_momentum_basis");
  return SliceOperator(space, centered_dft_matrix(space.dim(), space.spacing(), space.q_min()), "F");
}

SliceOperator kinetic_operator(const SliceSpace& space, double mass) {
  require_grid(space, "kinetic_operator");
  if (!(mass > 0.0)) throw InvalidArgument("kinetic_operator: mass must be positive");
  const CMatrix f = centered_dft_matrix(space.dim(), space.spacing(), space.q_min());
  Eigen::VectorXd diag(space.dim());
  for (int c = 0; c < space.dim(); ++c) {
    const double p = space.momentum(c);
    diag(c) = p * p / (2.0 * mass);
  }
  CMatrix k = f * diag.asDiagonal() * f.adjoint();
  k = 0.5 * (k + k.adjoint()).eval();
  return SliceOperator(space, std::move(k), "K");
}

SliceOperator potential_operator(const SliceSpace& space, const std::function<double(double)>& potential) {
  require_grid(space, "potential_operator");
  CMatrix v = CMatrix::Zero(space.dim(), space.dim());
  for (int j = 0; j < space.dim(); ++j) {
    const double q = space.position(j);
    const double value = potential(q);
    if (!std::isfinite(value)) {
      std::ostringstream msg;
      msg << "potential is not finite at q = " << q << " (grid index " << j << ")";
      throw InvalidPotential(msg.str());
    }
    v(j, j) = value;
  }
  return SliceOperator(space, std::move(v), "V");
}

SliceOperator build_hamiltonian(const SliceSpace& space, const std::function<double(double)>& potential,
                                double mass) {
  require_grid(space, "build_hamiltonian");
  const SliceOperator v = potential_operator(space, potential);
  const SliceOperator k = kinetic_operator(space, mass);
  return SliceOperator(space, k.matrix() + v.matrix(), "H");
}

SliceOperator propagator_step(const SliceOperator& hamiltonian, cplx dt) {
  const double scale = std::max(1.0, hamiltonian.matrix().cwiseAbs().maxCoeff());
  if (hamiltonian.hermiticity_defect() > 1e-12 * scale)
    throw InvalidArgument("propagator_step: Hamiltonian '" + hamiltonian.label() + "' is not Hermitian");
  if (dt == cplx{}) return SliceOperator(hamiltonian.space(), CMatrix::Identity(hamiltonian.dim(), hamiltonian.dim()),
                                          "U(0)");
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(hamiltonian.matrix());
  if (eig.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "propagator_step: eigendecomposition of '" << hamiltonian.label() << "' failed (dim "
        << hamiltonian.dim() << ", max |H| = " << scale << ")";
    throw NumericalError(msg.str());
  }
  const Eigen::VectorXd& e = eig.eigenvalues();
  CVector phases(e.size());
  for (Eigen::Index n = 0; n < e.size(); ++n) phases(n) = std::exp(-kI * e(n) * dt);
  const CMatrix& vecs = eig.eigenvectors();
  CMatrix u = vecs * phases.asDiagonal() * vecs.adjoint();
  return SliceOperator(hamiltonian.space(), std::move(u), "exp(-i" + hamiltonian.label() + "dt)");
}

SliceOperator annihilation_operator(const SliceSpace& space) {
  require_fock(space, "annihilation_operator");
  CMatrix a = CMatrix::Zero(space.dim(), space.dim());
  for (int n = 1; n < space.dim(); ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return SliceOperator(space, std::move(a), "a");
}

SliceOperator creation_operator(const SliceSpace& space) {
  SliceOperator a = annihilation_operator(space);
  return SliceOperator(space, a.matrix().adjoint(), "a^dagger");
}

SliceOperator position_operator(const SliceSpace& space) {
  if (space.is_grid()) {
    CMatrix q = CMatrix::Zero(space.dim(), space.dim());
    for (int j = 0; j < space.dim(); ++j) q(j, j) = space.position(j);
    return SliceOperator(space, std::move(q), "q");
  }
  const CMatrix a = annihilation_operator(space).matrix();
  const double scale = 1.0 / std::sqrt(2.0 * space.mass() * space.omega());
  return SliceOperator(space, scale * (a + a.adjoint()), "q");
}

SliceOperator momentum_operator(const SliceSpace& space) {
  if (space.is_grid()) {
    const CMatrix f = centered_dft_matrix(space.dim(), space.spacing(), space.q_min());
    Eigen::VectorXd p(space.dim());
    for (int c = 0; c < space.dim(); ++c) p(c) = space.momentum(c);
    return SliceOperator(space, f * p.asDiagonal() * f.adjoint(), "p");
  }
  const CMatrix a = annihilation_operator(space).matrix();
  const double scale = std::sqrt(0.5 * space.mass() * space.omega());
  return SliceOperator(space, kI * scale * (a.adjoint() - a), "p");
}

SliceOperator harmonic_hamiltonian(const SliceSpace& space) {
  require_fock(space, "harmonic_hamiltonian");
  CMatrix h = CMatrix::Zero(space.dim(), space.dim());
  for (int n = 0; n < space.dim(); ++n) h(n, n) = space.omega() * (n + 0.5);
  return SliceOperator(space, std::move(h), "H");
}

double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

SliceOperator random_hermitian(const SliceSpace& space, std::mt19937_64& rng) {
  const int m = space.dim();
  CMatrix a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double re = uniform_unit(rng);
      const double im = uniform_unit(rng);
      a(i, j) = cplx(re, im);
    }
  return SliceOperator(space, a + a.adjoint(), "H_rand");
}

}  // namespace pathint
