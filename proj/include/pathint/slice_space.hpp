#pragma once

// Single-slice Hilbert space: a periodic position grid or a truncated Fock
// space, its bases, Hamiltonians and exact one-step propagators.
//
// Grid conventions (used by every phase-sensitive routine in the project):
//   q_j = q_min + j * dq,                  j = 0 .. M-1
//   p_k = 2 pi k / (M dq),                 k = -floor(M/2) .. ceil(M/2)-1
//   <q_j | p_k> = exp(i p_k q_j) / sqrt(M)
// Momentum column c of the DFT matrix holds k = c - floor(M/2).

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "pathint/types.hpp"

namespace pathint {

enum class SliceKind { PositionGrid, FockTruncation };

class SliceSpace {
 public:
  static SliceSpace position_grid(int dim, double spacing, double q_min);
  /// Grid of `dim` points centred on the origin covering [-length/2, length/2).
  static SliceSpace centered_grid(int dim, double length);
  static SliceSpace fock(int dim, double mass, double omega);

  SliceKind kind() const { return kind_; }
  int dim() const { return dim_; }
  bool is_grid() const { return kind_ == SliceKind::PositionGrid; }

  double spacing() const { return spacing_; }
  double q_min() const { return q_min_; }
  double mass() const { return mass_; }
  double omega() const { return omega_; }

  double position(int j) const { return q_min_ + spacing_ * j; }
  double momentum(int column) const;
  std::vector<double> positions() const;
  std::vector<double> momenta() const;

  bool operator==(const SliceSpace&) const = default;

 private:
  SliceSpace() = default;

  SliceKind kind_ = SliceKind::PositionGrid;
  int dim_ = 0;
  double spacing_ = 0.0;
  double q_min_ = 0.0;
  double mass_ = 1.0;
  double omega_ = 1.0;
};

/// Dense operator on one slice.
class SliceOperator {
 public:
  SliceOperator(SliceSpace space, CMatrix matrix, std::string label);

  const SliceSpace& space() const { return space_; }
  const CMatrix& matrix() const { return matrix_; }
  const std::string& label() const { return label_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }

  /// max |A - A^dagger|
  double hermiticity_defect() const;
  /// max |U^dagger U - 1|
  double unitarity_defect() const;

  SliceOperator adjoint() const;
  SliceOperator operator*(const SliceOperator& rhs) const;

 private:
  SliceSpace space_;
  CMatrix matrix_;
  std::string label_;
};

SliceOperator identity_operator(const SliceSpace& space);

/// p^2/2m via the DFT momentum basis (exact periodic kinetic term). Grid only.
SliceOperator kinetic_operator(const SliceSpace& space, double mass);

/// V(q) on the diagonal. Throws InvalidPotential on non-finite values.
SliceOperator potential_operator(const SliceSpace& space, const std::function<double(double)>& potential);

SliceOperator build_hamiltonian(const SliceSpace& space, const std::function<double(double)>& potential,
                                double mass);

/// exp(-i H dt) by Hermitian eigendecomposition. Complex dt gives the Wick
/// rotated (non-unitary) step, e.g. dt = -i beta / N.
SliceOperator propagator_step(const SliceOperator& hamiltonian, cplx dt);

/// Unitary whose columns are momentum eigenstates in the position basis.
SliceOperator dft_momentum_basis(const SliceSpace& space);

/// Centred DFT matrix for any M >= 1 (the M = 1 case is [1]).
CMatrix centered_dft_matrix(int dim, double spacing, double q_min);

/// Position operator: diagonal on a grid, (a + a^dagger)/sqrt(2 m omega) in Fock.
SliceOperator position_operator(const SliceSpace& space);
SliceOperator momentum_operator(const SliceSpace& space);

/// Fock annihilation operator, <n-1|a|n> = sqrt(n).
SliceOperator annihilation_operator(const SliceSpace& space);
SliceOperator creation_operator(const SliceSpace& space);

/// omega (n + 1/2) on a Fock space, diagonal and exact.
SliceOperator harmonic_hamiltonian(const SliceSpace& space);

/// Seeded A + A^dagger with A entries uniform on the complex unit square
/// [0,1) + i[0,1). Bitwise reproducible across platforms.
SliceOperator random_hermitian(const SliceSpace& space, std::mt19937_64& rng);

/// Uniform double in [0, 1) from the top 53 bits of one generator draw.
double uniform_unit(std::mt19937_64& rng);

}  // namespace pathint
