// Copyright (c) 2026 the pumice authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "pumice/assembly.hpp"
#include "pumice/core.hpp"
#include "pumice/covering.hpp"

namespace pumice {

// Harmonic function on the unit disk,
//   u(r, theta) = a_0 + sum_{n>=1} r^n (a_n cos(n theta) + b_n sin(n theta)),
// evaluated with derivatives up to order 5 through the analytic completion
// u = Re f, f(z) = sum (a_n - i b_n) z^n. The truncated series is exact to
// machine precision well inside the disk; an optional closed form for
// f^(k)(z) replaces it everywhere when available.
class HarmonicSeries : public SmoothFn {
 public:
  HarmonicSeries() = default;
  // a[n], b[n] are the cos/sin coefficients; a[0] is the mean, b[0] unused.
  HarmonicSeries(std::vector<double> a, std::vector<double> b);

  void derivs(Vec2 x, int order, DerivSet& out) const override;

  int n_modes() const { return (int)a_.size() - 1; }
  double cos_coeff(int n) const { return a_.at(n); }
  double sin_coeff(int n) const { return b_.at(n); }

  // k-th complex derivative of the analytic completion at z; when set, used
  // instead of the truncated series.
  std::function<std::complex<double>(std::complex<double>, int)> closed_form;
  // The analytic completion has a singularity on the unit circle, so the
  // bare series converges slowly near the rim.
  bool pole_on_boundary = false;

 private:
  std::vector<double> a_, b_;
  std::vector<std::complex<double>> c_;
};

// Solution of the Neumann problem on the unit disk: harmonic u with
// du/dnu = g on the circle and zero mean, through the circular harmonics of
// g: a_n = p_n / n, b_n = q_n / n. Throws CompatibilityError when the data
// mean exceeds g.compat_tol relative to the coefficient scale.
HarmonicSeries neumann_solution(const NeumannData& g, int n_series = 400);

// Equivalent H^s norm of a harmonic function on the disk from its boundary
// coefficients:
//   norm^2 = 2 pi a_0^2 + pi sum_n (1 + n^2)^(s - 1/2) (a_n^2 + b_n^2).
// Returns +infinity (and sets *divergent) when the truncated sum is still
// growing: the top half of the modes carries more than 5% of the total.
double series_sobolev_norm(const HarmonicSeries& u, double s,
                           bool* divergent = nullptr);

// Boundary data together with its exact solution. `roughness` is the index
// k with g just outside H^{1/2-k} of the circle (0 for smooth densities,
// 1 for point masses, 2 for their derivatives).
struct BoundaryCase {
  NeumannData data;
  HarmonicSeries exact;
  int roughness = 0;
};

// Compensated point flux g = w (delta_theta0 - 1/(2 pi)):
//   u = -(w / pi) ln |x - y0|, y0 on the circle at angle theta0.
// The solution lies in H^{1-eps} but not H^1.
BoundaryCase log_pole(double theta0, double weight = 1.0, int n_series = 400);

// Point flux dipole g = w delta'_theta0, the tangential derivative of the
// point mass. The solution lies in H^{-eps} but not H^0.
BoundaryCase dipole(double theta0, double weight = 1.0, int n_series = 400);

// H1 error between the oracle and a discrete function over an admissible
// region, by tensor Gauss cells on the region grid. Throws
// SlowConvergenceWarning when a series-only evaluator with a boundary pole
// is asked to cover cells whose reach leaves a non-negligible series tail.
double interior_h1_error(const HarmonicSeries& u, const GfemFunction& u_S,
                         const AdmissibleSet& A);

}  // namespace pumice
