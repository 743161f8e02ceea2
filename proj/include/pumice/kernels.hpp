// Copyright (c) 2026 the pumice authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

// Data-parallel primitives behind the quadrature sweeps and covering scans.
// Scalar reference implementations always exist; on x86-64 an AVX2+FMA
// variant is selected at runtime (or forced off via force_scalar()).
namespace pumice::kernels {

enum class Isa { Scalar, Avx2 };

// Currently selected instruction set.
Isa active();

// Force the scalar reference path (for reproducibility across machines and
// for equivalence testing). Passing false re-enables auto detection.
void force_scalar(bool on);

// sum_i a[i] * b[i]
double dot(const double* a, const double* b, std::size_t n);

// sum_i a[i]
double sum(const double* a, std::size_t n);

// y[i] += s * x[i]
void axpy(double* y, const double* x, double s, std::size_t n);

// out[i] = (xs[i]-cx)^2 + (ys[i]-cy)^2
void dist2(const double* xs, const double* ys, double cx, double cy,
           double* out, std::size_t n);

// Upper-triangular symmetric rank-1 update:
// a[i*lda + j] += s * v[i] * v[j] for 0 <= i <= j < n.
void syr_upper(double* a, std::size_t lda, const double* v, double s,
               std::size_t n);

namespace detail {
double dot_scalar(const double* a, const double* b, std::size_t n);
double sum_scalar(const double* a, std::size_t n);
void axpy_scalar(double* y, const double* x, double s, std::size_t n);
void dist2_scalar(const double* xs, const double* ys, double cx, double cy,
                  double* out, std::size_t n);
void syr_upper_scalar(double* a, std::size_t lda, const double* v, double s,
                      std::size_t n);

double dot_avx2(const double* a, const double* b, std::size_t n);
double sum_avx2(const double* a, std::size_t n);
void axpy_avx2(double* y, const double* x, double s, std::size_t n);
void dist2_avx2(const double* xs, const double* ys, double cx, double cy,
                double* out, std::size_t n);
void syr_upper_avx2(double* a, std::size_t lda, const double* v, double s,
                    std::size_t n);
}  // namespace detail

}  // namespace pumice::kernels
