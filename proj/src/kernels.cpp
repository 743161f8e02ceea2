// Copyright (c) 2026 the pumice authors
// SPDX-License-Identifier: Apache-2.0

#include "pumice/kernels.hpp"

#include <atomic>

namespace pumice::kernels {

namespace detail {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

void axpy_scalar(double* y, const double* x, double s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += s * x[i];
}

void dist2_scalar(const double* xs, const double* ys, double cx, double cy,
                  double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - cx, dy = ys[i] - cy;
    out[i] = dx * dx + dy * dy;
  }
}

void syr_upper_scalar(double* a, std::size_t lda, const double* v, double s,
                      std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double f = s * v[i];
    double* row = a + i * lda;
    for (std::size_t j = i; j < n; ++j) row[j] += f * v[j];
  }
}

}  // namespace detail

namespace {

bool avx2_available() {
#if defined(PUMICE_AVX2_TU) && defined(__GNUC__) && defined(__x86_64__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::atomic<bool> g_force_scalar{false};

Isa detect() { return avx2_available() ? Isa::Avx2 : Isa::Scalar; }

Isa current() {
  static const Isa detected = detect();
  return g_force_scalar.load(std::memory_order_relaxed) ? Isa::Scalar : detected;
}

}  // namespace

Isa active() { return current(); }

void force_scalar(bool on) { g_force_scalar.store(on, std::memory_order_relaxed); }

double dot(const double* a, const double* b, std::size_t n) {
#ifdef PUMICE_AVX2_TU
  if (current() == Isa::Avx2) return detail::dot_avx2(a, b, n);
#endif
  return detail::dot_scalar(a, b, n);
}

double sum(const double* a, std::size_t n) {
#ifdef PUMICE_AVX2_TU
  if (current() == Isa::Avx2) return detail::sum_avx2(a, n);
#endif
  return detail::sum_scalar(a, n);
}

void axpy(double* y, const double* x, double s, std::size_t n) {
#ifdef PUMICE_AVX2_TU
  if (current() == Isa::Avx2) return detail::axpy_avx2(y, x, s, n);
#endif
  detail::axpy_scalar(y, x, s, n);
}

void dist2(const double* xs, const double* ys, double cx, double cy,
           double* out, std::size_t n) {
#ifdef PUMICE_AVX2_TU
  if (current() == Isa::Avx2) return detail::dist2_avx2(xs, ys, cx, cy, out, n);
#endif
  detail::dist2_scalar(xs, ys, cx, cy, out, n);
}

void syr_upper(double* a, std::size_t lda, const double* v, double s,
               std::size_t n) {
#ifdef PUMICE_AVX2_TU
  if (current() == Isa::Avx2) return detail::syr_upper_avx2(a, lda, v, s, n);
#endif
  detail::syr_upper_scalar(a, lda, v, s, n);
}

}  // namespace pumice::kernels
