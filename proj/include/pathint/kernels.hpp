#pragma once

// Complex inner-loop primitives used by the matrix-free Kronecker application.
//
// Every primitive has a portable scalar reference and, on x86-64, an AVX2/FMA
// variant compiled in its own translation unit. The variant is chosen once at
// runtime from CPUID; PATHINT_KERNELS=scalar in the environment forces the
// reference path.

#include <cstddef>

#include "pathint/types.hpp"

namespace pathint::kernels {

enum class Isa { Scalar, Avx2 };

struct Table {
  Isa isa;
  const char* name;
  // y[i] += a * x[i]
  void (*axpy)(std::size_t n, cplx a, const cplx* x, cplx* y);
  // sum_i x[i] * y[i]
  cplx (*dotu)(std::size_t n, const cplx* x, const cplx* y);
  // sum_i conj(x[i]) * y[i]
  cplx (*dotc)(std::size_t n, const cplx* x, const cplx* y);
};

const Table& scalar();

/// AVX2 table, or nullptr when not compiled in or not supported by this CPU.
const Table* avx2();

/// Best supported table (honours PATHINT_KERNELS=scalar).
const Table& active();

/// y = A x for one block: A is m x m row-major, x and y are m rows of `inner`
/// contiguous entries. Rows of y are overwritten.
void apply_block(const Table& k, const cplx* a_rowmajor, std::size_t m, const cplx* x, cplx* y,
                 std::size_t inner);

}  // namespace pathint::kernels
