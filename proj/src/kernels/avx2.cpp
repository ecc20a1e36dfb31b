#include "kernels_internal.hpp"

#if defined(PATHINT_HAVE_AVX2) && (defined(__x86_64__) || defined(_M_X64))
#include <immintrin.h>

#define PATHINT_AVX2_FN __attribute__((target("avx2,fma")))

namespace pathint::kernels {
namespace {

// Layout: complex<double> is two adjacent doubles, so one __m256d holds two
// complex values as [re0, im0, re1, im1].

PATHINT_AVX2_FN void axpy_avx2(std::size_t n, cplx a, const cplx* x, cplx* y) {
  const double* xd = reinterpret_cast<const double*>(x);
  double* yd = reinterpret_cast<double*>(y);
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x0 = _mm256_loadu_pd(xd + 2 * i);
    const __m256d x1 = _mm256_loadu_pd(xd + 2 * i + 4);
    const __m256d s0 = _mm256_permute_pd(x0, 0x5);
    const __m256d s1 = _mm256_permute_pd(x1, 0x5);
    // even lanes: ar*xr - ai*xi, odd lanes: ar*xi + ai*xr
    const __m256d p0 = _mm256_fmaddsub_pd(ar, x0, _mm256_mul_pd(ai, s0));
    const __m256d p1 = _mm256_fmaddsub_pd(ar, x1, _mm256_mul_pd(ai, s1));
    _mm256_storeu_pd(yd + 2 * i, _mm256_add_pd(_mm256_loadu_pd(yd + 2 * i), p0));
    _mm256_storeu_pd(yd + 2 * i + 4, _mm256_add_pd(_mm256_loadu_pd(yd + 2 * i + 4), p1));
  }
  for (; i + 2 <= n; i += 2) {
    const __m256d x0 = _mm256_loadu_pd(xd + 2 * i);
    const __m256d p0 = _mm256_fmaddsub_pd(ar, x0, _mm256_mul_pd(ai, _mm256_permute_pd(x0, 0x5)));
    _mm256_storeu_pd(yd + 2 * i, _mm256_add_pd(_mm256_loadu_pd(yd + 2 * i), p0));
  }
  for (; i < n; ++i) {
    const double xr = xd[2 * i], xi = xd[2 * i + 1];
    yd[2 * i] += a.real() * xr - a.imag() * xi;
    yd[2 * i + 1] += a.real() * xi + a.imag() * xr;
  }
}

// Accumulates [xr*yr, xi*yr] into acc_r and [xi*yi, xr*yi] into acc_i.
PATHINT_AVX2_FN inline void accumulate_products(const double* xd, const double* yd, std::size_t n,
                                                __m256d& acc_r, __m256d& acc_i, std::size_t& i) {
  __m256d r1 = _mm256_setzero_pd(), i1 = _mm256_setzero_pd();
  for (; i + 4 <= n; i += 4) {
    const __m256d x0 = _mm256_loadu_pd(xd + 2 * i);
    const __m256d y0 = _mm256_loadu_pd(yd + 2 * i);
    const __m256d x1 = _mm256_loadu_pd(xd + 2 * i + 4);
    const __m256d y1 = _mm256_loadu_pd(yd + 2 * i + 4);
    acc_r = _mm256_fmadd_pd(x0, _mm256_movedup_pd(y0), acc_r);
    acc_i = _mm256_fmadd_pd(_mm256_permute_pd(x0, 0x5), _mm256_permute_pd(y0, 0xF), acc_i);
    r1 = _mm256_fmadd_pd(x1, _mm256_movedup_pd(y1), r1);
    i1 = _mm256_fmadd_pd(_mm256_permute_pd(x1, 0x5), _mm256_permute_pd(y1, 0xF), i1);
  }
  for (; i + 2 <= n; i += 2) {
    const __m256d x0 = _mm256_loadu_pd(xd + 2 * i);
    const __m256d y0 = _mm256_loadu_pd(yd + 2 * i);
    acc_r = _mm256_fmadd_pd(x0, _mm256_movedup_pd(y0), acc_r);
    acc_i = _mm256_fmadd_pd(_mm256_permute_pd(x0, 0x5), _mm256_permute_pd(y0, 0xF), acc_i);
  }
  acc_r = _mm256_add_pd(acc_r, r1);
  acc_i = _mm256_add_pd(acc_i, i1);
}

// Sum of the even lanes and of the odd lanes.
PATHINT_AVX2_FN inline void lane_sums(__m256d v, double& even, double& odd) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  even = _mm_cvtsd_f64(s);
  odd = _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}

PATHINT_AVX2_FN cplx dotu_avx2(std::size_t n, const cplx* x, const cplx* y) {
  const double* xd = reinterpret_cast<const double*>(x);
  const double* yd = reinterpret_cast<const double*>(y);
  __m256d acc_r = _mm256_setzero_pd(), acc_i = _mm256_setzero_pd();
  std::size_t i = 0;
  accumulate_products(xd, yd, n, acc_r, acc_i, i);
  double re_r, im_r, re_i, im_i;
  lane_sums(acc_r, re_r, im_r);  // sum xr*yr, sum xi*yr
  lane_sums(acc_i, re_i, im_i);  // sum xi*yi, sum xr*yi
  double re = re_r - re_i, im = im_r + im_i;
  for (; i < n; ++i) {
    re += xd[2 * i] * yd[2 * i] - xd[2 * i + 1] * yd[2 * i + 1];
    im += xd[2 * i] * yd[2 * i + 1] + xd[2 * i + 1] * yd[2 * i];
  }
  return {re, im};
}

PATHINT_AVX2_FN cplx dotc_avx2(std::size_t n, const cplx* x, const cplx* y) {
  const double* xd = reinterpret_cast<const double*>(x);
  const double* yd = reinterpret_cast<const double*>(y);
  __m256d acc_r = _mm256_setzero_pd(), acc_i = _mm256_setzero_pd();
  std::size_t i = 0;
  accumulate_products(xd, yd, n, acc_r, acc_i, i);
  double xr_yr, xi_yr, xi_yi, xr_yi;
  lane_sums(acc_r, xr_yr, xi_yr);
  lane_sums(acc_i, xi_yi, xr_yi);
  double re = xr_yr + xi_yi, im = xr_yi - xi_yr;
  for (; i < n; ++i) {
    re += xd[2 * i] * yd[2 * i] + xd[2 * i + 1] * yd[2 * i + 1];
    im += xd[2 * i] * yd[2 * i + 1] - xd[2 * i + 1] * yd[2 * i];
  }
  return {re, im};
}

}  // namespace

namespace detail {

const Table* avx2_table() {
  static const Table table{Isa::Avx2, "avx2", &axpy_avx2, &dotu_avx2, &dotc_avx2};
  return &table;
}

}  // namespace detail
}  // namespace pathint::kernels

#else

namespace pathint::kernels::detail {

const Table* avx2_table() { return nullptr; }

}  // namespace pathint::kernels::detail

#endif
