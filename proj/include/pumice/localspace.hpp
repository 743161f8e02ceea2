// Copyright (c) 2026 the pumice authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <functional>

#include "pumice/core.hpp"
#include "pumice/polynomial.hpp"

namespace pumice {

// The local approximation space on every patch: polynomials up to `degree`
// in the scaled frame X = (x - center)/scale. Fast value/gradient fills for
// the assembly loops.
struct PolyBasis {
  int degree = 1;
  Vec2 center{0, 0};
  double scale = 1;

  int size() const { return monomial_count(degree); }
  void values(Vec2 x, double* out) const;
  void values_grads(Vec2 x, double* v, double* gx, double* gy) const;
  Poly2 combination(const double* c) const;
};

// Exact Gram matrices over the ball B(center, R) for the scaled monomials
// of a frame with the same center and the given scale.
Eigen::MatrixXd ball_gram_value(int degree, double R, double scale);
// Gradient (H1 seminorm) Gram with true spatial derivatives.
Eigen::MatrixXd ball_gram_grad(int degree, double R, double scale);
// Second-derivative (H2 seminorm) Gram, sum over both mixed orders.
Eigen::MatrixXd ball_gram_hess(int degree, double R, double scale);

// Sharp constants of the local space, measured through generalized
// eigenproblems on exact Grams over the unit ball and the concentric ball
// of radius flat_ratio. All values are scale-invariant: on a patch of
// radius R the physical inverse constants carry an extra 1/R per
// derivative order.
struct EquivalenceConstants {
  int degree = 0;
  double flat_ratio = 0;
  double l2_full_over_flat = 0;  // sup ||v||_{L2(B_1)} / ||v||_{L2(B_t)}
  double h1_full_over_flat = 0;  // same for the gradient seminorm
  double inverse_h1 = 0;         // sup |v|_{H1(B_1)} / ||v||_{L2(B_1)}
  double inverse_h2 = 0;         // sup |v|_{H2(B_1)} / |v|_{H1(B_1)}
};
EquivalenceConstants measure_equivalence(int degree, double flat_ratio);

// L2-averaged Taylor polynomial of degree m of u over the ball B(c, tau),
// expressed in the frame (frame_center, frame_scale). Reproduces
// polynomials of degree <= m exactly; needs u derivatives up to order m.
Poly2 averaged_taylor(const SmoothFn& u, int m, Vec2 c, double tau,
                      Vec2 frame_center, double frame_scale);

// H1(B(c, R)) projection onto polynomials of degree <= m in the given
// frame, from pointwise jets of the target. The ball must lie inside the
// target's smooth region. The projection residual has zero ball average.
Poly2 h1_ball_projection(const std::function<Jet2(Vec2)>& f, int m, Vec2 c,
                         double R, Vec2 frame_center, double frame_scale);

}  // namespace pumice
