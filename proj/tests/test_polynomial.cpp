// Copyright (c) 2026 the pumice authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "pumice/polynomial.hpp"

using namespace pumice;

TEST_CASE("unit ball moments") {
  CHECK(unit_ball_moment(0, 0) == doctest::Approx(M_PI));
  CHECK(unit_ball_moment(2, 0) == doctest::Approx(M_PI / 4));
  CHECK(unit_ball_moment(0, 2) == doctest::Approx(M_PI / 4));
  CHECK(unit_ball_moment(2, 2) == doctest::Approx(M_PI / 24));
  CHECK(unit_ball_moment(4, 0) == doctest::Approx(M_PI / 8));
  CHECK(unit_ball_moment(1, 0) == 0);
  CHECK(unit_ball_moment(3, 2) == 0);
}

TEST_CASE("poly eval, jet, derivative") {
  // p = 2 + 3 X Y - X^2 with X = (x-1)/2, Y = (y+1)/2
  Poly2 p(2, {1, -1}, 2);
  p.coeff(0, 0) = 2;
  p.coeff(1, 1) = 3;
  p.coeff(2, 0) = -1;
  const Vec2 at{1.8, 0.2};  // X = 0.4, Y = 0.6
  CHECK(p.eval(at) == doctest::Approx(2 + 3 * 0.24 - 0.16));
  const Jet2 j = p.jet(at);
  CHECK(j.v == doctest::Approx(p.eval(at)));
  CHECK(j.gx == doctest::Approx((3 * 0.6 - 2 * 0.4) / 2));
  CHECK(j.gy == doctest::Approx(3 * 0.4 / 2));
  CHECK(j.hxx == doctest::Approx(-2.0 / 4));
  CHECK(j.hxy == doctest::Approx(3.0 / 4));
  CHECK(j.hyy == doctest::Approx(0.0));

  const Poly2 px = p.deriv_x();
  CHECK(px.eval(at) == doctest::Approx(j.gx));
  const Poly2 py = p.deriv_y();
  CHECK(py.eval(at) == doctest::Approx(j.gy));
}

TEST_CASE("product and rebase are exact") {
  Poly2 a(1, {0.3, 0.1}, 0.7);
  a.coeff(0, 0) = 1.5;
  a.coeff(1, 0) = -0.5;
  a.coeff(0, 1) = 2.0;
  Poly2 b(2, {0.3, 0.1}, 0.7);
  b.coeff(0, 0) = 0.2;
  b.coeff(1, 1) = 1.0;
  b.coeff(0, 2) = -0.7;
  const Poly2 ab = a * b;
  const Poly2 c = ab.rebased({-0.4, 0.6}, 1.3);
  for (double x : {-0.5, 0.0, 0.8})
    for (double y : {-0.3, 0.4, 1.1}) {
      const Vec2 q{x, y};
      CHECK(ab.eval(q) == doctest::Approx(a.eval(q) * b.eval(q)).epsilon(1e-12));
      CHECK(c.eval(q) == doctest::Approx(ab.eval(q)).epsilon(1e-12));
    }
}

TEST_CASE("derivative matrices act on coefficients") {
  const int deg = 3;
  const auto Dx = deriv_x_matrix(deg);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(monomial_count(deg));
  c[mono_index(2, 1)] = 5.0;  // 5 X^2 Y
  const Eigen::VectorXd dc = Dx * c;
  CHECK(dc[mono_index(1, 1)] == doctest::Approx(10.0));
  CHECK(dc.lpNorm<1>() == doctest::Approx(10.0));
}

TEST_CASE("unit ball gram is symmetric positive definite") {
  const auto G = gram_unit_ball(4);
  CHECK((G - G.transpose()).norm() < 1e-14);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  CHECK(es.eigenvalues().minCoeff() > 0);
  CHECK(G(0, 0) == doctest::Approx(M_PI));
}
