#pragma once

// Dense Kronecker-product assembly. Independent of the matrix-free path and
// used as its reference on small instances.

#include <span>

#include "pathint/extended_space.hpp"
#include "pathint/types.hpp"

namespace pathint::dense {

/// A_0 (x) A_1 (x) ... with slice 0 most significant.
CMatrix kron(std::span<const CMatrix> factors);

/// Permutation matrix of the cyclic time shift (direction +1 or -1).
CMatrix time_shift(int slice_dim, int slices, int direction);

/// Dense e^{iS} = shift * (x)_t U_t.
CMatrix action(const ActionSpec& spec);

/// Operator on slice `slice` only: 1 (x) .. (x) A (x) .. (x) 1.
CMatrix embed(const CMatrix& op, int slice, int slices);

}  // namespace pathint::dense
