// Copyright (c) 2026 the pumice authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pumice/core.hpp"

namespace pumice {

double binomial(int n, int k);

// Exact integral of x^p y^q over the unit disk.
double unit_ball_moment(int p, int q);

// Dense bivariate polynomial in the scaled monomial basis
//   X^p Y^q,  X = (x - cx)/scale,  Y = (y - cy)/scale,
// with coefficients in graded-lex order (see monomials_up_to).
class Poly2 {
 public:
  Poly2() = default;
  Poly2(int degree, Vec2 center, double scale);

  static Poly2 monomial(int p, int q, Vec2 center, double scale);

  int degree() const { return degree_; }
  Vec2 center() const { return center_; }
  double scale() const { return scale_; }

  const std::vector<double>& coeffs() const { return c_; }
  std::vector<double>& coeffs() { return c_; }
  double& coeff(int p, int q) { return c_[mono_index(p, q)]; }
  double coeff(int p, int q) const { return c_[mono_index(p, q)]; }

  double eval(Vec2 x) const;
  Jet2 jet(Vec2 x) const;

  // True spatial derivatives (the 1/scale factor is folded in).
  Poly2 deriv_x() const;
  Poly2 deriv_y() const;

  Poly2 operator*(double s) const;
  Poly2& operator+=(const Poly2& o);  // frames must match
  Poly2 operator*(const Poly2& o) const;  // frames must match

  // Exact re-expansion around a new center/scale. new_degree defaults to
  // the current degree (the map is exact whenever new_degree >= degree).
  Poly2 rebased(Vec2 new_center, double new_scale, int new_degree = -1) const;

 private:
  int degree_ = 0;
  Vec2 center_{0, 0};
  double scale_ = 1.0;
  std::vector<double> c_;
};

// Operator matrices over monomials_up_to(deg), graded-lex order, acting on
// coefficient vectors in the X,Y variables (no 1/scale factor).
Eigen::MatrixXd deriv_x_matrix(int deg);
Eigen::MatrixXd deriv_y_matrix(int deg);

// L2 Gram of the monomials on the unit disk, exact.
Eigen::MatrixXd gram_unit_ball(int deg);

}  // namespace pumice
