// Compiled with -mavx2 only; reached through the dispatch table after a
// runtime CPU check.

#include <immintrin.h>

#include <cmath>

#include "kernels_internal.hpp"

namespace dyadlab::simd::detail {
namespace {

constexpr std::size_t kWidth = 4;

double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 * kWidth <= n; i += 2 * kWidth) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + kWidth));
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i];
  return s;
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 * kWidth <= n; i += 2 * kWidth) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(x + i + kWidth),
                                             _mm256_loadu_pd(y + i + kWidth)));
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void pair_sums_avx2(const double* in, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    __m256d a = _mm256_loadu_pd(in + 2 * i);           // a0 a1 a2 a3
    __m256d b = _mm256_loadu_pd(in + 2 * i + kWidth);  // b0 b1 b2 b3
    // hadd gives a0+a1 b0+b1 a2+a3 b2+b3
    __m256d h = _mm256_hadd_pd(a, b);
    _mm256_storeu_pd(out + i, _mm256_permute4x64_pd(h, 0b11011000));
  }
  for (; i < n; ++i) out[i] = in[2 * i] + in[2 * i + 1];
}

void add_scalar_avx2(double* x, std::size_t n, double c) {
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    _mm256_storeu_pd(x + i, _mm256_add_pd(_mm256_loadu_pd(x + i), vc));
  }
  for (; i < n; ++i) x[i] += c;
}

void max_scalar_avx2(double* x, std::size_t n, double c) {
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    // max_pd(a, b) returns b when a < b is false, matching x < c ? c : x
    _mm256_storeu_pd(x + i, _mm256_max_pd(vc, _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) x[i] = x[i] < c ? c : x[i];
}

void sqrt_avx2(double* x, std::size_t n) {
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    _mm256_storeu_pd(x + i, _mm256_sqrt_pd(_mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) x[i] = std::sqrt(x[i]);
}

void multiply_avx2(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void scale_avx2(double* x, std::size_t n, double c) {
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), vc));
  }
  for (; i < n; ++i) x[i] *= c;
}

}  // namespace

const KernelTable kAvx2Table{
    Backend::avx2,    "avx2",          &sum_avx2,  &dot_avx2,      &pair_sums_avx2,
    &add_scalar_avx2, &max_scalar_avx2, &sqrt_avx2, &multiply_avx2, &scale_avx2,
};

}  // namespace dyadlab::simd::detail
