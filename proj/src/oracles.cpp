// Copyright (c) 2026 the pumice authors
// SPDX-License-Identifier: Apache-2.0

#include "pumice/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pumice/norms.hpp"

namespace pumice {

using cplx = std::complex<double>;

HarmonicSeries::HarmonicSeries(std::vector<double> a, std::vector<double> b)
    : a_(std::move(a)), b_(std::move(b)) {
  if (a_.empty()) a_.push_back(0.0);
  b_.resize(a_.size(), 0.0);
  c_.resize(a_.size());
  for (size_t n = 0; n < a_.size(); ++n) c_[n] = cplx(a_[n], -b_[n]);
}

void HarmonicSeries::derivs(Vec2 x, int order, DerivSet& out) const {
  if (order < 0 || order > 5)
    throw Error("series derivatives support orders 0 through 5");
  out = DerivSet{};
  out.order = order;
  const cplx z(x.x, x.y);

  cplx F[6];
  if (closed_form) {
    for (int k = 0; k <= order; ++k) F[k] = closed_form(z, k);
  } else {
    const int N = n_modes();
    for (int k = 0; k <= order; ++k) {
      // Horner for f^(k)(z) = sum_{n>=k} n! / (n-k)! c_n z^(n-k).
      cplx acc(0, 0);
      double fall = 1;
      for (int i = 0; i < k; ++i) fall *= N - i;
      for (int n = N; n >= k; --n) {
        acc = acc * z + fall * c_[n];
        if (n > k) fall *= (double)(n - k) / n;
      }
      F[k] = acc;
    }
  }

  // d^(p,q) Re f = Re(i^q f^(p+q)).
  for (int k = 0; k <= order; ++k)
    for (int q = 0; q <= k; ++q) {
      const cplx w = F[k];
      double v = 0;
      switch (q % 4) {
        case 0: v = w.real(); break;
        case 1: v = -w.imag(); break;
        case 2: v = -w.real(); break;
        case 3: v = w.imag(); break;
      }
      out.at(k - q, q) = v;
    }
}

HarmonicSeries neumann_solution(const NeumannData& g, int n_series) {
  if (n_series < 1) throw Error("need at least one series mode");
  double c0 = 0;
  std::vector<double> p, q;
  circle_harmonics(g, n_series, 4096, c0, p, q);

  double scale = 0;
  for (int n = 1; n <= n_series; ++n)
    scale = std::max({scale, std::abs(p[n]), std::abs(q[n])});
  const double mean = 2 * M_PI * c0;
  if (std::isfinite(g.compat_tol) &&
      std::abs(mean) > g.compat_tol * std::max(1.0, scale))
    throw CompatibilityError("boundary data has nonzero mean");

  std::vector<double> a(n_series + 1, 0.0), b(n_series + 1, 0.0);
  for (int n = 1; n <= n_series; ++n) {
    a[n] = p[n] / n;
    b[n] = q[n] / n;
  }
  return HarmonicSeries(std::move(a), std::move(b));
}

double series_sobolev_norm(const HarmonicSeries& u, double s,
                           bool* divergent) {
  const int N = u.n_modes();
  double total = 0, low = 0;
  for (int n = 1; n <= N; ++n) {
    const double an = u.cos_coeff(n), bn = u.sin_coeff(n);
    const double term =
        M_PI * std::pow(1.0 + (double)n * n, s - 0.5) * (an * an + bn * bn);
    total += term;
    if (n <= N / 2) low += term;
  }
  const bool grows = total > 0 && (total - low) > 0.05 * total;
  if (divergent) *divergent = grows;
  if (grows) return std::numeric_limits<double>::infinity();
  const double a0 = u.cos_coeff(0);
  return std::sqrt(2 * M_PI * a0 * a0 + total);
}

BoundaryCase log_pole(double theta0, double weight, int n_series) {
  BoundaryCase out;
  out.data.atoms.push_back({theta0, 0, weight});
  const double bias = -weight / (2 * M_PI);
  out.data.density = [bias](double) { return bias; };

  std::vector<double> a(n_series + 1, 0.0), b(n_series + 1, 0.0);
  for (int n = 1; n <= n_series; ++n) {
    a[n] = weight / (n * M_PI) * std::cos(n * theta0);
    b[n] = weight / (n * M_PI) * std::sin(n * theta0);
  }
  out.exact = HarmonicSeries(std::move(a), std::move(b));
  const cplx alpha = std::exp(cplx(0, -theta0));
  const double w = weight;
  out.exact.closed_form = [alpha, w](cplx z, int k) -> cplx {
    const cplx d = 1.0 - alpha * z;
    if (k == 0) return -(w / M_PI) * std::log(d);
    double fact = 1;
    for (int i = 1; i < k; ++i) fact *= i;
    return (w / M_PI) * fact * std::pow(alpha, k) / std::pow(d, k);
  };
  out.exact.pole_on_boundary = true;
  out.roughness = 1;
  return out;
}

BoundaryCase dipole(double theta0, double weight, int n_series) {
  BoundaryCase out;
  out.data.atoms.push_back({theta0, 1, weight});

  std::vector<double> a(n_series + 1, 0.0), b(n_series + 1, 0.0);
  for (int n = 1; n <= n_series; ++n) {
    a[n] = weight / M_PI * std::sin(n * theta0);
    b[n] = -weight / M_PI * std::cos(n * theta0);
  }
  out.exact = HarmonicSeries(std::move(a), std::move(b));
  const cplx alpha = std::exp(cplx(0, -theta0));
  const double w = weight;
  out.exact.closed_form = [alpha, w](cplx z, int k) -> cplx {
    const cplx iw(0, w / M_PI);
    const cplx d = 1.0 - alpha * z;
    if (k == 0) return iw * (1.0 / d - 1.0);
    double fact = 1;
    for (int i = 1; i <= k; ++i) fact *= i;
    return iw * fact * std::pow(alpha, k) / std::pow(d, k + 1);
  };
  out.exact.pole_on_boundary = true;
  out.roughness = 2;
  return out;
}

double interior_h1_error(const HarmonicSeries& u, const GfemFunction& u_S,
                         const AdmissibleSet& A) {
  if (u.pole_on_boundary && !u.closed_form) {
    double reach = 0;
    for (const Box2& b : A.region.cell_boxes()) {
      reach = std::max(reach, Vec2{b.lo.x, b.lo.y}.norm());
      reach = std::max(reach, Vec2{b.hi.x, b.lo.y}.norm());
      reach = std::max(reach, Vec2{b.lo.x, b.hi.y}.norm());
      reach = std::max(reach, Vec2{b.hi.x, b.hi.y}.norm());
    }
    // The truncated tail at radius r scales like r^N, so demand it be
    // negligible against the accuracy the oracle is supposed to deliver.
    const int N = std::max(1, u.n_modes());
    if (std::pow(std::min(reach, 1.0), N) > 1e-8 || reach >= 1)
      throw SlowConvergenceWarning(
          "series-only evaluation requested too close to the rim");
  }
  return error_norms(u_S, u, region_rule(A)).h1();
}

}  // namespace pumice
