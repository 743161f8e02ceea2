// Copyright (c) 2026 the pumice authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <vector>

#include "pumice/core.hpp"
#include "pumice/geometry.hpp"

namespace pumice {

// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

struct QuadRule {
  std::vector<double> x, y, w;
  // Start offsets of spatially coherent point runs (one per generating
  // cell); consumers may sweep run by run to reuse locality.
  std::vector<size_t> cells;

  size_t size() const { return w.size(); }
  void reserve(size_t n) { x.reserve(n); y.reserve(n); w.reserve(n); }
  void begin_cell() { cells.push_back(w.size()); }
  size_t n_cells() const { return cells.size(); }
  size_t cell_begin(size_t k) const { return cells[k]; }
  size_t cell_end(size_t k) const {
    return k + 1 < cells.size() ? cells[k + 1] : w.size();
  }
  void append(Vec2 p, double wt) {
    x.push_back(p.x);
    y.push_back(p.y);
    w.push_back(wt);
  }
  Vec2 point(size_t i) const { return {x[i], y[i]}; }

  double total_weight() const;

  template <class F>
  double integrate(F&& f) const {
    double s = 0;
    for (size_t i = 0; i < w.size(); ++i) s += w[i] * f(Vec2{x[i], y[i]});
    return s;
  }
};

// Requested physical cell size at a point; return <= 0 for "no preference".
using SizeField = std::function<double(Vec2)>;

// Tensor Gauss-Legendre on an axis-aligned box.
QuadRule box_rule(Box2 b, int nx, int ny);

// Union of boxes, tensor Gauss per box.
QuadRule cells_rule(const std::vector<Box2>& cells, int n1d);

// Gauss in radius (against the area weight r dr) times periodic trapezoid
// in angle, over the full ball B(c, R).
QuadRule polar_ball_rule(Vec2 c, double R, int nr, int nt);

// Rule over the whole domain (disk/star). The domain is covered exactly by
// curvilinear polar cells around its center; cells are split until their
// physical extent is below max_cell (and below `finer` where provided),
// then carry a tensor Gauss rule of n1d x n1d points.
QuadRule domain_rule(const Domain& dom, double max_cell, int n1d,
                     const SizeField& finer = nullptr);

// Rule over B(c, R) intersected with the domain, c strictly inside. Polar
// around c with the radial extent cut at the boundary crossing per angle.
QuadRule ball_domain_rule(const Domain& dom, Vec2 c, double R, int nr, int nt);

// Boundary quadrature in the arc-length parameter: `panels` equal panels
// with n1d Gauss points each. Weights sum to the boundary length.
struct BoundaryRule {
  std::vector<double> s, w;
  size_t size() const { return s.size(); }
};
BoundaryRule boundary_rule(const Domain& dom, int panels, int n1d);

}  // namespace pumice
