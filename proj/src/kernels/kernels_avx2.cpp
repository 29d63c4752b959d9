// AVX2 variants. This file is compiled with -mavx2 -mfma and must only be
// entered after the dispatcher confirmed CPU support.

#include <immintrin.h>

#include <algorithm>

#include "kernels/kernels_internal.hpp"

namespace fairspec::kernels::detail {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i];
  return acc;
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double min_sum_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(acc, _mm256_min_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  double out = hsum(acc);
  for (; i < n; ++i) out += std::min(a[i], b[i]);
  return out;
}

double positive_diff_avx2(const double* a, const double* b, double* out, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  __m256d acc = zero;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_max_pd(zero, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    _mm256_storeu_pd(out + i, d);
    acc = _mm256_add_pd(acc, d);
  }
  double total = hsum(acc);
  for (; i < n; ++i) {
    out[i] = std::max(0.0, a[i] - b[i]);
    total += out[i];
  }
  return total;
}

void scale_avx2(const double* x, double c, double* out, std::size_t n) {
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, _mm256_mul_pd(vc, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) out[i] = c * x[i];
}

void axpy_avx2(double c, const double* x, double* y, std::size_t n) {
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(vc, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += c * x[i];
}

void lerp_avx2(double* x, const double* v, double t, std::size_t n) {
  const double keep = 1.0 - t;
  const __m256d vk = _mm256_set1_pd(keep);
  const __m256d vt = _mm256_set1_pd(t);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_mul_pd(vk, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(x + i, _mm256_fmadd_pd(vt, _mm256_loadu_pd(v + i), r));
  }
  for (; i < n; ++i) x[i] = keep * x[i] + t * v[i];
}

void reciprocal_avx2(const double* x, double* out, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  // Full-precision divide; _mm256_rcp_ps would lose the 1e-12 contract.
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, _mm256_div_pd(one, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) out[i] = 1.0 / x[i];
}

void min_plus_scaled_avx2(const double* a, const double* b, const double* r, double c, double* out,
                          std::size_t n) {
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d m = _mm256_min_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(vc, _mm256_loadu_pd(r + i), m));
  }
  for (; i < n; ++i) out[i] = std::min(a[i], b[i]) + c * r[i];
}

}  // namespace

const KernelTable& avx2_kernels() noexcept {
  static constexpr KernelTable table{
      sum_avx2,  dot_avx2,  min_sum_avx2,    positive_diff_avx2,  scale_avx2,
      axpy_avx2, lerp_avx2, reciprocal_avx2, min_plus_scaled_avx2,
  };
  return table;
}

}  // namespace fairspec::kernels::detail
