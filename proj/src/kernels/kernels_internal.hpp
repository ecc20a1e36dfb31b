#pragma once

#include "pathint/kernels.hpp"

namespace pathint::kernels::detail {

// Compiled-in AVX2 table, or nullptr on targets without the variant. Does not
// check CPU support; avx2() does.
const Table* avx2_table();

}  // namespace pathint::kernels::detail
