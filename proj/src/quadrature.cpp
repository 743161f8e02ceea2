// Copyright (c) 2026 the pumice authors
// SPDX-License-Identifier: Apache-2.0

#include "pumice/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "pumice/kernels.hpp"

namespace pumice {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.resize(n);
  weights.resize(n);
  // Newton iteration on P_n over [-1, 1], then map to [0, 1].
  for (int i = 0; i < n; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (t * p1 - p0) / (t * t - 1);
      const double dt = p1 / pp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    nodes[n - 1 - i] = 0.5 * (1 + t);
    weights[n - 1 - i] = 1.0 / ((1 - t * t) * pp * pp);
  }
}

double QuadRule::total_weight() const {
  return kernels::sum(w.data(), w.size());
}

QuadRule box_rule(Box2 b, int nx, int ny) {
  std::vector<double> gx, wx, gy, wy;
  gauss_legendre(nx, gx, wx);
  gauss_legendre(ny, gy, wy);
  const Vec2 e = b.extent();
  QuadRule r;
  r.reserve((size_t)nx * ny);
  r.begin_cell();
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      r.append({b.lo.x + e.x * gx[i], b.lo.y + e.y * gy[j]},
               e.x * e.y * wx[i] * wy[j]);
  return r;
}

QuadRule cells_rule(const std::vector<Box2>& cells, int n1d) {
  std::vector<double> g, w;
  gauss_legendre(n1d, g, w);
  QuadRule r;
  r.reserve(cells.size() * n1d * n1d);
  for (const Box2& b : cells) {
    r.begin_cell();
    const Vec2 e = b.extent();
    for (int i = 0; i < n1d; ++i)
      for (int j = 0; j < n1d; ++j)
        r.append({b.lo.x + e.x * g[i], b.lo.y + e.y * g[j]},
                 e.x * e.y * w[i] * w[j]);
  }
  return r;
}

QuadRule polar_ball_rule(Vec2 c, double R, int nr, int nt) {
  std::vector<double> g, w;
  gauss_legendre(nr, g, w);
  QuadRule rule;
  rule.reserve((size_t)nr * nt);
  for (int k = 0; k < nt; ++k) {
    const double th = kTwoPi * k / nt;
    const Vec2 u{std::cos(th), std::sin(th)};
    rule.begin_cell();
    for (int i = 0; i < nr; ++i) {
      const double r = R * g[i];
      rule.append(c + u * r, (kTwoPi / nt) * R * w[i] * r);
    }
  }
  return rule;
}

namespace {

struct PolarFrame {
  Vec2 c;
  const Domain* dom;
  Vec2 at(double t, double v) const {
    return dom->angle_point(t) * v + c * (1 - v);
  }
};

// Recursive splitting of a cell [t0,t1]x[v0,v1] in the normalized polar
// coordinates x = c + v (gamma(t) - c), dA = v |cross(gamma - c, gamma')|.
void emit_polar_cells(const PolarFrame& fr, double t0, double t1, double v0,
                      double v1, double max_cell, const SizeField& finer,
                      int depth, const std::vector<double>& g,
                      const std::vector<double>& w, QuadRule& out) {
  const double tm = 0.5 * (t0 + t1), vm = 0.5 * (v0 + v1);
  const Vec2 pm = fr.at(tm, vm);
  const double rm = (fr.dom->angle_point(tm) - fr.c).norm();
  const double wt = (t1 - t0) * rm * v1;  // width at the outer edge
  const double wv = (v1 - v0) * rm;
  double target = max_cell;
  if (finer) {
    for (const Vec2 p : {pm, fr.at(t0, v0), fr.at(t1, v0), fr.at(t0, v1), fr.at(t1, v1)}) {
      const double t = finer(p);
      if (t > 0) target = std::min(target, t);
    }
  }
  if (depth < 30 && (wt > target || wv > target)) {
    if (wt >= wv) {
      emit_polar_cells(fr, t0, tm, v0, v1, max_cell, finer, depth + 1, g, w, out);
      emit_polar_cells(fr, tm, t1, v0, v1, max_cell, finer, depth + 1, g, w, out);
    } else {
      emit_polar_cells(fr, t0, t1, v0, vm, max_cell, finer, depth + 1, g, w, out);
      emit_polar_cells(fr, t0, t1, vm, v1, max_cell, finer, depth + 1, g, w, out);
    }
    return;
  }
  out.begin_cell();
  const int n = (int)g.size();
  for (int i = 0; i < n; ++i) {
    const double t = t0 + (t1 - t0) * g[i];
    const Vec2 q = fr.dom->angle_point(t) - fr.c;
    const double jac_t = std::abs(cross(q, fr.dom->angle_velocity(t)));
    for (int j = 0; j < n; ++j) {
      const double v = v0 + (v1 - v0) * g[j];
      out.append(fr.c + q * v,
                 (t1 - t0) * (v1 - v0) * w[i] * w[j] * v * jac_t);
    }
  }
}

}  // namespace

QuadRule domain_rule(const Domain& dom, double max_cell, int n1d,
                     const SizeField& finer) {
  if (!dom.has_angle_param())
    throw Error("volume quadrature unavailable for this domain");
  if (!(max_cell > 0)) throw InfeasibleParameters("max_cell must be positive");
  std::vector<double> g, w;
  gauss_legendre(n1d, g, w);
  PolarFrame fr{dom.center(), &dom};
  QuadRule out;
  // Seed with enough angular panels that each spans a modest arc.
  const int seed = 8;
  for (int k = 0; k < seed; ++k)
    emit_polar_cells(fr, kTwoPi * k / seed, kTwoPi * (k + 1) / seed, 0, 1,
                     max_cell, finer, 0, g, w, out);
  return out;
}

QuadRule ball_domain_rule(const Domain& dom, Vec2 c, double R, int nr, int nt) {
  if (!dom.inside(c))
    throw InfeasibleParameters("ball center must lie inside the domain");
  std::vector<double> g, w;
  gauss_legendre(nr, g, w);
  QuadRule rule;
  rule.reserve((size_t)nr * nt);
  for (int k = 0; k < nt; ++k) {
    const double th = kTwoPi * k / nt;
    const Vec2 u{std::cos(th), std::sin(th)};
    rule.begin_cell();
    double rmax = R;
    if (!dom.inside(c + u * R)) {
      // Bisect for the boundary crossing along the ray.
      double lo = 0, hi = R;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (dom.inside(c + u * mid) ? lo : hi) = mid;
      }
      rmax = 0.5 * (lo + hi);
    }
    for (int i = 0; i < nr; ++i) {
      const double r = rmax * g[i];
      rule.append(c + u * r, (kTwoPi / nt) * rmax * w[i] * r);
    }
  }
  return rule;
}

BoundaryRule boundary_rule(const Domain& dom, int panels, int n1d) {
  std::vector<double> g, w;
  gauss_legendre(n1d, g, w);
  const double L = dom.arc_length();
  const double dl = L / panels;
  BoundaryRule r;
  r.s.reserve((size_t)panels * n1d);
  r.w.reserve((size_t)panels * n1d);
  for (int p = 0; p < panels; ++p)
    for (int i = 0; i < n1d; ++i) {
      r.s.push_back(dl * (p + g[i]));
      r.w.push_back(dl * w[i]);
    }
  return r;
}

}  // namespace pumice
