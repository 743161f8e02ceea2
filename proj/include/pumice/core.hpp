// Copyright (c) 2026 the pumice authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace pumice {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double xx, double yy) : x(xx), y(yy) {}

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2 operator-() const { return {-x, -y}; }
  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }

  double squared_norm() const { return x * x + y * y; }
  double norm() const { return std::sqrt(squared_norm()); }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline Vec2 perp(Vec2 v) { return {-v.y, v.x}; }
inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

struct Box2 {
  Vec2 lo, hi;
  Vec2 extent() const { return hi - lo; }
  Vec2 center() const { return (lo + hi) * 0.5; }
  bool contains(Vec2 p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
  }
  Box2 padded(double m) const { return {lo - Vec2(m, m), hi + Vec2(m, m)}; }
};

// Value together with first and second derivatives at a point.
// The Hessian is stored as (hxx, hxy, hyy).
struct Jet2 {
  double v = 0, gx = 0, gy = 0, hxx = 0, hxy = 0, hyy = 0;

  static Jet2 constant(double c) { return {c, 0, 0, 0, 0, 0}; }

  Jet2 operator+(const Jet2& o) const {
    return {v + o.v, gx + o.gx, gy + o.gy, hxx + o.hxx, hxy + o.hxy, hyy + o.hyy};
  }
  Jet2 operator-(const Jet2& o) const {
    return {v - o.v, gx - o.gx, gy - o.gy, hxx - o.hxx, hxy - o.hxy, hyy - o.hyy};
  }
  Jet2& operator+=(const Jet2& o) {
    v += o.v; gx += o.gx; gy += o.gy; hxx += o.hxx; hxy += o.hxy; hyy += o.hyy;
    return *this;
  }
  Jet2 operator*(double s) const {
    return {v * s, gx * s, gy * s, hxx * s, hxy * s, hyy * s};
  }
  // Leibniz product rule through second order.
  Jet2 operator*(const Jet2& o) const {
    Jet2 r;
    r.v = v * o.v;
    r.gx = gx * o.v + v * o.gx;
    r.gy = gy * o.v + v * o.gy;
    r.hxx = hxx * o.v + 2 * gx * o.gx + v * o.hxx;
    r.hxy = hxy * o.v + gx * o.gy + gy * o.gx + v * o.hxy;
    r.hyy = hyy * o.v + 2 * gy * o.gy + v * o.hyy;
    return r;
  }
  // Quotient rule; caller guarantees o.v != 0.
  Jet2 operator/(const Jet2& o) const {
    Jet2 r;
    const double iv = 1.0 / o.v;
    r.v = v * iv;
    r.gx = (gx - r.v * o.gx) * iv;
    r.gy = (gy - r.v * o.gy) * iv;
    r.hxx = (hxx - 2 * r.gx * o.gx - r.v * o.hxx) * iv;
    r.hxy = (hxy - r.gx * o.gy - r.gy * o.gx - r.v * o.hxy) * iv;
    r.hyy = (hyy - 2 * r.gy * o.gy - r.v * o.hyy) * iv;
    return r;
  }
  Vec2 grad() const { return {gx, gy}; }
};

// Jet of a radial profile f(|x - c|) given f, f', f'' at r = |x - c|.
// u is the unit direction (x - c)/r; for r below tol the profile must be
// locally constant (plateau) and the derivative terms are zero.
inline Jet2 radial_jet(double f, double df, double ddf, Vec2 u, double r) {
  Jet2 jet;
  jet.v = f;
  if (r <= 0) return jet;
  jet.gx = df * u.x;
  jet.gy = df * u.y;
  const double t = df / r;
  jet.hxx = ddf * u.x * u.x + t * (1 - u.x * u.x);
  jet.hxy = (ddf - t) * u.x * u.y;
  jet.hyy = ddf * u.y * u.y + t * (1 - u.y * u.y);
  return jet;
}

// Partial derivatives d^(p,q) f for p+q <= order, order <= 5.
struct DerivSet {
  int order = 0;
  std::array<double, 21> d{};

  static int idx(int p, int q) {
    const int k = p + q;
    return k * (k + 1) / 2 + q;
  }
  double& at(int p, int q) { return d[idx(p, q)]; }
  double at(int p, int q) const { return d[idx(p, q)]; }
};

// A scalar field with analytically supplied derivatives.
class SmoothFn {
 public:
  virtual ~SmoothFn() = default;
  virtual void derivs(Vec2 x, int order, DerivSet& out) const = 0;

  double value(Vec2 x) const {
    DerivSet s;
    derivs(x, 0, s);
    return s.at(0, 0);
  }
  Vec2 grad(Vec2 x) const {
    DerivSet s;
    derivs(x, 1, s);
    return {s.at(1, 0), s.at(0, 1)};
  }
  Jet2 jet(Vec2 x) const {
    DerivSet s;
    derivs(x, 2, s);
    return {s.at(0, 0), s.at(1, 0), s.at(0, 1), s.at(2, 0), s.at(1, 1), s.at(0, 2)};
  }
};

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Requested h/sigma cannot produce a valid covering on this domain.
class InfeasibleParameters : public Error {
 public:
  using Error::Error;
};

// Construction finished but some of the domain is not covered; carries the
// worst witness (deepest uncovered point) for reporting.
class CoverageFailure : public Error {
 public:
  CoverageFailure(const std::string& msg, std::vector<Vec2> pts, Vec2 w)
      : Error(msg), uncovered(std::move(pts)), witness(w) {}
  std::vector<Vec2> uncovered;
  Vec2 witness;
};

class NormalizationFailure : public Error {
 public:
  using Error::Error;
};

class CompatibilityError : public Error {
 public:
  using Error::Error;
};

class SingularSystem : public Error {
 public:
  using Error::Error;
};

class DegenerateBasis : public Error {
 public:
  using Error::Error;
};

// A truncated series evaluator was asked for values too close to its
// circle of convergence to be trustworthy.
class SlowConvergenceWarning : public Error {
 public:
  using Error::Error;
};

inline int monomial_count(int degree) { return (degree + 1) * (degree + 2) / 2; }

// Position of x^p y^q in the graded-lex enumeration below.
inline int mono_index(int p, int q) {
  const int k = p + q;
  return k * (k + 1) / 2 + q;
}

struct MonoIndex {
  int px = 0, py = 0;
};

// Graded lexicographic enumeration of bivariate monomials up to total degree m.
inline std::vector<MonoIndex> monomials_up_to(int degree) {
  std::vector<MonoIndex> out;
  out.reserve(monomial_count(degree));
  for (int k = 0; k <= degree; ++k)
    for (int q = 0; q <= k; ++q) out.push_back({k - q, q});
  return out;
}

// Uniform hash grid over 2d points for fixed-radius neighbor queries.
class PointGrid {
 public:
  explicit PointGrid(double cell) : cell_(cell) {}

  void insert(int id, Vec2 p) {
    ids_.push_back(id);
    xs_.push_back(p.x);
    ys_.push_back(p.y);
    cells_.push_back(key(p));
    dirty_ = true;
  }

  // Ids of stored points within `radius` of p (inclusive).
  void gather(Vec2 p, double radius, std::vector<int>& out) const {
    out.clear();
    if (ids_.empty()) return;
    rebuild();
    const double r2 = radius * radius;
    const int cx0 = coord(p.x - radius), cx1 = coord(p.x + radius);
    const int cy0 = coord(p.y - radius), cy1 = coord(p.y + radius);
    for (int cy = cy0; cy <= cy1; ++cy)
      for (int cx = cx0; cx <= cx1; ++cx) {
        auto it = index_.find(pack(cx, cy));
        if (it == index_.end()) continue;
        for (int slot = it->second; slot >= 0; slot = next_[slot]) {
          const double dx = xs_[slot] - p.x, dy = ys_[slot] - p.y;
          if (dx * dx + dy * dy <= r2) out.push_back(ids_[slot]);
        }
      }
  }

  bool any_within(Vec2 p, double radius) const {
    if (ids_.empty()) return false;
    rebuild();
    const double r2 = radius * radius;
    const int cx0 = coord(p.x - radius), cx1 = coord(p.x + radius);
    const int cy0 = coord(p.y - radius), cy1 = coord(p.y + radius);
    for (int cy = cy0; cy <= cy1; ++cy)
      for (int cx = cx0; cx <= cx1; ++cx) {
        auto it = index_.find(pack(cx, cy));
        if (it == index_.end()) continue;
        for (int slot = it->second; slot >= 0; slot = next_[slot]) {
          const double dx = xs_[slot] - p.x, dy = ys_[slot] - p.y;
          if (dx * dx + dy * dy <= r2) return true;
        }
      }
    return false;
  }

  size_t size() const { return ids_.size(); }

 private:
  int coord(double v) const { return (int)std::floor(v / cell_); }
  int64_t key(Vec2 p) const { return pack(coord(p.x), coord(p.y)); }
  static int64_t pack(int cx, int cy) {
    return ((int64_t)cx << 32) ^ (uint32_t)cy;
  }
  void rebuild() const {
    if (!dirty_) return;
    index_.clear();
    next_.assign(ids_.size(), -1);
    for (size_t i = 0; i < ids_.size(); ++i) {
      auto [it, fresh] = index_.try_emplace(cells_[i], (int)i);
      if (!fresh) {
        next_[i] = it->second;
        it->second = (int)i;
      }
    }
    dirty_ = false;
  }

  double cell_;
  std::vector<int> ids_;
  std::vector<double> xs_, ys_;
  std::vector<int64_t> cells_;
  mutable std::unordered_map<int64_t, int> index_;
  mutable std::vector<int> next_;
  mutable bool dirty_ = true;
};

}  // namespace pumice
