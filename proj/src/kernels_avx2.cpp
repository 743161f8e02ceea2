// Copyright (c) 2026 the pumice authors
// SPDX-License-Identifier: Apache-2.0

// AVX2 + FMA variants. This translation unit is the only one compiled with
// -mavx2 -mfma; it must be reached only after a runtime cpuid check.

#include <immintrin.h>

#include <cstddef>

namespace pumice::kernels::detail {

namespace {
inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}
}  // namespace

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  double r = hsum(acc);
  for (; i < n; ++i) r += a[i] * b[i];
  return r;
}

double sum_avx2(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  double r = hsum(acc);
  for (; i < n; ++i) r += a[i];
  return r;
}

void axpy_avx2(double* y, const double* x, double s, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(vs, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += s * x[i];
}

void dist2_avx2(const double* xs, const double* ys, double cx, double cy,
                double* out, std::size_t n) {
  const __m256d vcx = _mm256_set1_pd(cx), vcy = _mm256_set1_pd(cy);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vcx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), vcy);
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy)));
  }
  for (; i < n; ++i) {
    const double dx = xs[i] - cx, dy = ys[i] - cy;
    out[i] = dx * dx + dy * dy;
  }
}

void syr_upper_avx2(double* a, std::size_t lda, const double* v, double s,
                    std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double f = s * v[i];
    const __m256d vf = _mm256_set1_pd(f);
    double* row = a + i * lda;
    std::size_t j = i;
    for (; j + 4 <= n; j += 4) {
      __m256d r = _mm256_loadu_pd(row + j);
      r = _mm256_fmadd_pd(vf, _mm256_loadu_pd(v + j), r);
      _mm256_storeu_pd(row + j, r);
    }
    for (; j < n; ++j) row[j] += f * v[j];
  }
}

}  // namespace pumice::kernels::detail
