#include <cstdlib>
#include <string_view>

#include "kernels_internal.hpp"

namespace pathint::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(__GNUC__) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

}  // namespace

const Table* avx2() {
  static const Table* table = cpu_has_avx2() ? detail::avx2_table() : nullptr;
  return table;
}

const Table& active() {
  static const Table& chosen = [] () -> const Table& {
    const char* env = std::getenv("PATHINT_KERNELS");
    if (env != nullptr && std::string_view(env) == "scalar") return scalar();
    if (const Table* t = avx2()) return *t;
    return scalar();
  }();
  return chosen;
}

void apply_block(const Table& k, const cplx* a_rowmajor, std::size_t m, const cplx* x, cplx* y,
                 std::size_t inner) {
  if (inner == 1) {
    for (std::size_t row = 0; row < m; ++row) y[row] = k.dotu(m, a_rowmajor + row * m, x);
    return;
  }
  for (std::size_t row = 0; row < m; ++row) {
    cplx* out = y + row * inner;
    for (std::size_t i = 0; i < inner; ++i) out[i] = cplx{};
    const cplx* a_row = a_rowmajor + row * m;
    for (std::size_t col = 0; col < m; ++col) {
      if (a_row[col] == cplx{}) continue;
      k.axpy(inner, a_row[col], x + col * inner, out);
    }
  }
}

}  // namespace pathint::kernels
