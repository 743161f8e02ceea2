// Copyright (c) 2026 the pumice authors
// SPDX-License-Identifier: Apache-2.0

#include "pumice/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace pumice {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// 5-point Gauss-Legendre on [0,1].
constexpr double kG5x[5] = {0.046910077030668, 0.230765344947158, 0.5,
                            0.769234655052841, 0.953089922969332};
constexpr double kG5w[5] = {0.118463442528095, 0.239314335249683,
                            0.284444444444444, 0.239314335249683,
                            0.118463442528095};

double wrap_angle(double t) {
  t = std::fmod(t, kTwoPi);
  if (t < 0) t += kTwoPi;
  return t;
}

// Parabola-circle corner of the cusp domain: x^2 + x^4 = 1.
const double kCuspXc = std::sqrt((std::sqrt(5.0) - 1.0) / 2.0);
const double kCuspPhiC = std::atan2(kCuspXc * kCuspXc, kCuspXc);

}  // namespace

std::shared_ptr<Domain> Domain::disk(double radius, Vec2 center) {
  if (!(radius > 0)) throw InfeasibleParameters("disk radius must be positive");
  auto d = std::shared_ptr<Domain>(new Domain());
  d->kind_ = Kind::Disk;
  d->center_ = center;
  d->radius_ = radius;
  d->bbox_ = {center - Vec2(radius, radius), center + Vec2(radius, radius)};
  d->arc_length_ = kTwoPi * radius;
  d->reach_ = radius;
  return d;
}

std::shared_ptr<Domain> Domain::star(std::vector<double> cos_coeffs, Vec2 center) {
  if (cos_coeffs.empty())
    throw InfeasibleParameters("star needs at least the constant radius term");
  auto d = std::shared_ptr<Domain>(new Domain());
  d->kind_ = Kind::Star;
  d->center_ = center;
  d->coeffs_ = std::move(cos_coeffs);

  double rmin = 1e300, rmax = -1e300, kap_max = 0;
  for (int i = 0; i < 4096; ++i) {
    const double t = kTwoPi * i / 4096;
    const double r = d->star_r(t);
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
    const Vec2 v = d->angle_velocity(t);
    const double dr = d->star_dr(t), ddr = d->star_ddr(t);
    // curvature of a polar graph
    const double num = r * r + 2 * dr * dr - r * ddr;
    kap_max = std::max(kap_max, std::abs(num) / std::pow(v.squared_norm(), 1.5));
  }
  if (rmin <= 0)
    throw InfeasibleParameters("star radius function must stay positive");
  d->radius_ = rmax;
  d->bbox_ = {center - Vec2(rmax, rmax), center + Vec2(rmax, rmax)};
  d->reach_ = 0.5 * std::min(rmin, 1.0 / std::max(kap_max, 1e-12));
  d->build_arclength_table();
  return d;
}

std::shared_ptr<Domain> Domain::cusp() {
  auto d = std::shared_ptr<Domain>(new Domain());
  d->kind_ = Kind::Cusp;
  d->center_ = {0.5, 0};
  d->radius_ = 1.0;
  const double ymax = std::sin(kCuspPhiC);
  d->bbox_ = {{0, -ymax}, {1, ymax}};
  d->reach_ = 0;
  return d;
}

bool Domain::inside(Vec2 p) const {
  switch (kind_) {
    case Kind::Disk:
      return (p - center_).squared_norm() < radius_ * radius_;
    case Kind::Star: {
      const Vec2 q = p - center_;
      const double rr = q.norm();
      if (rr == 0) return true;
      return rr < star_r(std::atan2(q.y, q.x));
    }
    case Kind::Cusp:
      return p.x > 0 && std::abs(p.y) < p.x * p.x &&
             p.squared_norm() < 1.0;
  }
  return false;
}

double Domain::boundary_distance(Vec2 p) const {
  switch (kind_) {
    case Kind::Disk:
      return std::abs(radius_ - (p - center_).norm());
    case Kind::Star:
      return star_distance(p);
    case Kind::Cusp:
      return cusp_distance(p);
  }
  return 0;
}

double Domain::signed_depth(Vec2 p) const {
  const double d = boundary_distance(p);
  return inside(p) ? d : -d;
}

double Domain::star_r(double t) const {
  double r = coeffs_[0];
  for (size_t k = 1; k < coeffs_.size(); ++k) r += coeffs_[k] * std::cos(k * t);
  return r;
}

double Domain::star_dr(double t) const {
  double dr = 0;
  for (size_t k = 1; k < coeffs_.size(); ++k)
    dr -= coeffs_[k] * k * std::sin(k * t);
  return dr;
}

double Domain::star_ddr(double t) const {
  double ddr = 0;
  for (size_t k = 1; k < coeffs_.size(); ++k)
    ddr -= coeffs_[k] * k * k * std::cos(k * t);
  return ddr;
}

Vec2 Domain::angle_point(double t) const {
  if (kind_ == Kind::Disk)
    return center_ + Vec2(radius_ * std::cos(t), radius_ * std::sin(t));
  if (kind_ == Kind::Star) {
    const double r = star_r(t);
    return center_ + Vec2(r * std::cos(t), r * std::sin(t));
  }
  throw Error("angle parametrization unavailable for this domain");
}

Vec2 Domain::angle_velocity(double t) const {
  if (kind_ == Kind::Disk)
    return {-radius_ * std::sin(t), radius_ * std::cos(t)};
  if (kind_ == Kind::Star) {
    const double r = star_r(t), dr = star_dr(t);
    const double c = std::cos(t), s = std::sin(t);
    return {dr * c - r * s, dr * s + r * c};
  }
  throw Error("angle parametrization unavailable for this domain");
}

double Domain::angle_of(Vec2 p) const {
  const Vec2 q = p - center_;
  return wrap_angle(std::atan2(q.y, q.x));
}

double Domain::star_distance(Vec2 p) const {
  // Coarse scan then Newton on the squared distance along the angle parameter.
  const int M = 512;
  double best_t = 0, best_d2 = 1e300;
  for (int i = 0; i < M; ++i) {
    const double t = kTwoPi * i / M;
    const double d2 = (angle_point(t) - p).squared_norm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best_t = t;
    }
  }
  double t = best_t;
  for (int it = 0; it < 40; ++it) {
    const Vec2 x = angle_point(t), v = angle_velocity(t);
    const double r = star_r(t), dr = star_dr(t), ddr = star_ddr(t);
    const double c = std::cos(t), s = std::sin(t);
    const Vec2 acc{ddr * c - 2 * dr * s - r * c, ddr * s + 2 * dr * c - r * s};
    const Vec2 e = x - p;
    const double g = dot(e, v);
    const double H = dot(v, v) + dot(e, acc);
    if (H <= 0) break;
    const double step = g / H;
    t -= step;
    if (std::abs(step) < 1e-14) break;
  }
  return std::min((angle_point(t) - p).norm(), std::sqrt(best_d2));
}

double Domain::cusp_distance(Vec2 p) const {
  double best = 1e300;
  // Parabolic sides y = +-x^2, x in [0, xc].
  for (int sign = -1; sign <= 1; sign += 2) {
    const double a = p.x, b = sign * p.y;
    auto dist2_at = [&](double t) {
      const double dx = t - a, dy = t * t - b;
      return dx * dx + dy * dy;
    };
    // Stationary points of the squared distance: 2t^3 + t(1 - 2b) - a = 0.
    double starts[3] = {std::clamp(a, 0.0, kCuspXc),
                        std::clamp(b > 0 ? std::sqrt(b) : 0.0, 0.0, kCuspXc),
                        0.5 * kCuspXc};
    for (double t : starts) {
      for (int it = 0; it < 60; ++it) {
        const double f = 2 * t * t * t + t * (1 - 2 * b) - a;
        const double df = 6 * t * t + (1 - 2 * b);
        if (std::abs(df) < 1e-14) break;
        const double step = f / df;
        t -= step;
        if (std::abs(step) < 1e-14) break;
      }
      t = std::clamp(t, 0.0, kCuspXc);
      best = std::min(best, dist2_at(t));
    }
    best = std::min(best, dist2_at(0.0));
    best = std::min(best, dist2_at(kCuspXc));
  }
  best = std::sqrt(best);
  // Circular arc between the two corners.
  const double phi = std::atan2(p.y, p.x);
  const double rr = p.norm();
  if (std::abs(phi) <= kCuspPhiC && p.x > 0) {
    best = std::min(best, std::abs(rr - 1.0));
  } else {
    const Vec2 corner{kCuspXc, (p.y >= 0 ? 1 : -1) * kCuspXc * kCuspXc};
    best = std::min(best, (p - corner).norm());
  }
  return best;
}

void Domain::build_arclength_table() {
  const int M = 4096;
  cum_s_.assign(M + 1, 0.0);
  const double dt = kTwoPi / M;
  for (int i = 0; i < M; ++i) {
    double seg = 0;
    for (int g = 0; g < 5; ++g)
      seg += kG5w[g] * angle_velocity((i + kG5x[g]) * dt).norm();
    cum_s_[i + 1] = cum_s_[i] + seg * dt;
  }
  arc_length_ = cum_s_[M];
}

double Domain::arc_length() const {
  if (kind_ == Kind::Cusp)
    throw Error("arc-length parametrization unavailable for this domain");
  return arc_length_;
}

double Domain::param_of_arclength(double s) const {
  if (kind_ == Kind::Disk) return s / radius_;
  s = std::fmod(s, arc_length_);
  if (s < 0) s += arc_length_;
  const int M = (int)cum_s_.size() - 1;
  const auto it = std::upper_bound(cum_s_.begin(), cum_s_.end(), s);
  int i = std::max(0, (int)(it - cum_s_.begin()) - 1);
  i = std::min(i, M - 1);
  const double dt = kTwoPi / M;
  double t = i * dt + dt * (s - cum_s_[i]) /
                          std::max(cum_s_[i + 1] - cum_s_[i], 1e-300);
  // Newton refinement on cumulative arclength.
  for (int it2 = 0; it2 < 4; ++it2) {
    // arclength from t_i to t with a 5-point rule
    double seg = 0;
    const double a = i * dt, w = t - a;
    for (int g = 0; g < 5; ++g)
      seg += kG5w[g] * angle_velocity(a + kG5x[g] * w).norm();
    const double f = cum_s_[i] + seg * w - s;
    const double df = angle_velocity(t).norm();
    t -= f / df;
  }
  return t;
}

Vec2 Domain::boundary_point(double s) const {
  if (kind_ == Kind::Cusp)
    throw Error("arc-length parametrization unavailable for this domain");
  return angle_point(param_of_arclength(s));
}

Vec2 Domain::boundary_tangent(double s) const {
  const Vec2 v = angle_velocity(param_of_arclength(s));
  return v / v.norm();
}

Vec2 Domain::outward_normal(double s) const {
  const Vec2 t = boundary_tangent(s);
  return {t.y, -t.x};
}

double Domain::curvature(double s) const {
  const double t = param_of_arclength(s);
  const Vec2 v = angle_velocity(t);
  Vec2 acc;
  if (kind_ == Kind::Disk) {
    acc = {-radius_ * std::cos(t), -radius_ * std::sin(t)};
  } else {
    const double r = star_r(t), dr = star_dr(t), ddr = star_ddr(t);
    const double c = std::cos(t), sn = std::sin(t);
    acc = {ddr * c - 2 * dr * sn - r * c, ddr * sn + 2 * dr * c - r * sn};
  }
  return cross(v, acc) / std::pow(v.norm(), 3);
}

double Domain::reach_estimate() const { return reach_; }

std::vector<Vec2> Domain::interior_probes(double spacing) const {
  if (kind_ != Kind::Cusp) return {center_};
  std::vector<Vec2> out;
  for (double x = spacing; x < 0.98; x += spacing) out.push_back({x, 0});
  return out;
}

double Domain::area_hint() const {
  if (kind_ == Kind::Disk) return M_PI * radius_ * radius_;
  if (kind_ == Kind::Star) {
    double a = 0;
    const int M = 2048;
    for (int i = 0; i < M; ++i) {
      const double r = star_r(kTwoPi * i / M);
      a += 0.5 * r * r * kTwoPi / M;
    }
    return a;
  }
  return 0.6;  // cusp, sizing only
}

std::vector<Vec2> Domain::offset_curve_points(double r, double min_spacing) const {
  if (kind_ == Kind::Cusp)
    throw Error("offset curve unavailable for this domain");
  if (!(r > 0) || !(min_spacing > 0))
    throw InfeasibleParameters("offset depth and spacing must be positive");
  if (kind_ != Kind::Disk && r >= reach_)
    throw InfeasibleParameters("offset depth exceeds the boundary reach");
  if (kind_ == Kind::Disk && r >= radius_)
    throw InfeasibleParameters("offset depth exceeds the disk radius");

  // Dense inward offset samples q(t) = x(t) - r * nu(t).
  const int M = 8192;
  std::vector<Vec2> dense(M);
  for (int i = 0; i < M; ++i) {
    const double t = kTwoPi * i / M;
    const Vec2 x = angle_point(t);
    const Vec2 v = angle_velocity(t);
    const Vec2 nu = Vec2{v.y, -v.x} / v.norm();
    dense[i] = x - nu * r;
  }
  // Offset validity: every sample must sit at depth r.
  for (int i = 0; i < M; i += 16) {
    if (!inside(dense[i]) || std::abs(boundary_distance(dense[i]) - r) > 1e-6 * r + 1e-9)
      throw InfeasibleParameters("offset curve self-intersects at this depth");
  }

  std::vector<double> cum(M + 1, 0.0);
  for (int i = 0; i < M; ++i)
    cum[i + 1] = cum[i] + (dense[(i + 1) % M] - dense[i]).norm();
  const double L = cum[M];
  const int n = (int)std::floor(L / (1.002 * min_spacing));
  if (n < 4)
    throw InfeasibleParameters("offset curve too short for requested spacing");

  std::vector<Vec2> out;
  out.reserve(n);
  const double step = L / n;
  int seg = 0;
  for (int k = 0; k < n; ++k) {
    const double target = k * step;
    while (seg + 1 <= M && cum[seg + 1] < target) ++seg;
    const double w = (target - cum[seg]) /
                     std::max(cum[seg + 1] - cum[seg], 1e-300);
    Vec2 p = dense[seg % M] * (1 - w) + dense[(seg + 1) % M] * w;
    // Polish to the exact depth.
    if (kind_ == Kind::Disk) {
      const Vec2 u = (p - center_) / (p - center_).norm();
      p = center_ + u * (radius_ - r);
    } else {
      for (int it = 0; it < 3; ++it) {
        const double d = boundary_distance(p);
        if (std::abs(d - r) < 1e-10) break;
        const double eps = 1e-7;
        const Vec2 g{(boundary_distance({p.x + eps, p.y}) -
                      boundary_distance({p.x - eps, p.y})) / (2 * eps),
                     (boundary_distance({p.x, p.y + eps}) -
                      boundary_distance({p.x, p.y - eps})) / (2 * eps)};
        const double g2 = g.squared_norm();
        if (g2 < 1e-12) break;
        p += g * ((r - d) / g2);
      }
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace pumice
