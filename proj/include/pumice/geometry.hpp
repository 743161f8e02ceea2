// Copyright (c) 2026 the pumice authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <vector>

#include "pumice/core.hpp"

namespace pumice {

// A bounded planar domain with a piecewise-smooth boundary. Three concrete
// shapes are supported:
//   disk  - circle of given radius and center
//   star  - polar graph r(t) = c0 + sum_k c_k cos(k t) around a center
//   cusp  - { (x,y) : x >= 0, -x^2 <= y <= x^2, x^2 + y^2 <= 1 }, whose
//           boundary pinches to zero width at the origin. The cusp supports
//           inside/distance queries only; it exists as a negative test for
//           covering construction and cannot be solved on.
class Domain {
 public:
  enum class Kind { Disk, Star, Cusp };

  static std::shared_ptr<Domain> disk(double radius, Vec2 center = {0, 0});
  static std::shared_ptr<Domain> star(std::vector<double> cos_coeffs,
                                      Vec2 center = {0, 0});
  static std::shared_ptr<Domain> cusp();

  Kind kind() const { return kind_; }
  bool inside(Vec2 p) const;

  // Unsigned distance to the boundary, accurate to ~1e-10.
  double boundary_distance(Vec2 p) const;
  // Positive inside, negative outside.
  double signed_depth(Vec2 p) const;

  // Arc-length boundary parametrization (disk/star only; throws for cusp).
  double arc_length() const;
  Vec2 boundary_point(double s) const;
  Vec2 boundary_tangent(double s) const;   // unit, counterclockwise
  Vec2 outward_normal(double s) const;     // unit
  double curvature(double s) const;

  // Angle parametrization (disk/star): position and velocity of the
  // boundary as a graph over the polar angle around the centroid.
  bool has_angle_param() const { return kind_ != Kind::Cusp; }
  Vec2 angle_point(double t) const;
  Vec2 angle_velocity(double t) const;
  double angle_of(Vec2 p) const;  // polar angle of p around the center

  // Points on the inward offset curve at depth r, resampled so consecutive
  // spacing lies in [min_spacing, 2*min_spacing). Each point is polished to
  // |distance to boundary - r| <= 1e-8. Throws InfeasibleParameters when the
  // offset depth exceeds the reach of the boundary.
  std::vector<Vec2> offset_curve_points(double r, double min_spacing) const;

  // Conservative lower estimate of the boundary reach (offset validity).
  double reach_estimate() const;

  // Interior points tracing the thinnest passages of the domain (the cusp
  // wedge axis), used to seed coverage checks that a uniform grid could
  // miss. Disk and star have no thin passages and return just the center.
  std::vector<Vec2> interior_probes(double spacing) const;

  Vec2 center() const { return center_; }
  Box2 bbox() const { return bbox_; }
  double area_hint() const;  // coarse, for sizing only

 private:
  Domain() = default;

  double star_r(double t) const;
  double star_dr(double t) const;
  double star_ddr(double t) const;
  double star_distance(Vec2 p) const;
  double cusp_distance(Vec2 p) const;
  void build_arclength_table();
  double param_of_arclength(double s) const;

  Kind kind_ = Kind::Disk;
  Vec2 center_{0, 0};
  double radius_ = 1.0;
  std::vector<double> coeffs_;
  Box2 bbox_{{-1, -1}, {1, 1}};
  double arc_length_ = 0;
  std::vector<double> cum_s_;   // arclength at uniform t samples
  double reach_ = 0;
};

}  // namespace pumice
