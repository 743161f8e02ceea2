// Copyright (c) 2026 the pumice authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "pumice/polynomial.hpp"
#include "pumice/quadrature.hpp"

using namespace pumice;

TEST_CASE("gauss-legendre is exact to degree 2n-1") {
  std::vector<double> x, w;
  for (int n : {1, 2, 5, 8, 16}) {
    gauss_legendre(n, x, w);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double s = 0;
      for (int i = 0; i < n; ++i) s += w[i] * std::pow(x[i], k);
      CHECK(s == doctest::Approx(1.0 / (k + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("box rule integrates polynomials") {
  const Box2 b{{-1, 0.5}, {2, 1.5}};
  const QuadRule r = box_rule(b, 4, 4);
  CHECK(r.total_weight() == doctest::Approx(3.0));
  const double s = r.integrate([](Vec2 p) { return p.x * p.x * p.y; });
  CHECK(s == doctest::Approx(3.0 * 1.0));  // int x^2 dx = 3, int y dy = 1
}

TEST_CASE("polar ball rule reproduces exact ball moments") {
  const Vec2 c{0.4, -0.7};
  const double R = 0.6;
  const QuadRule r = polar_ball_rule(c, R, 6, 32);
  CHECK(r.total_weight() == doctest::Approx(M_PI * R * R).epsilon(1e-12));
  for (int p = 0; p <= 4; ++p)
    for (int q = 0; p + q <= 4; ++q) {
      const double got = r.integrate([&](Vec2 z) {
        return std::pow((z.x - c.x) / R, p) * std::pow((z.y - c.y) / R, q);
      });
      CHECK(got == doctest::Approx(R * R * unit_ball_moment(p, q))
                       .epsilon(1e-11)
                       .scale(1.0));
    }
}

TEST_CASE("domain rule on the disk") {
  auto d = Domain::disk(1.0);
  const QuadRule r = domain_rule(*d, 0.2, 5);
  CHECK(r.total_weight() == doctest::Approx(M_PI).epsilon(1e-10));
  CHECK(r.integrate([](Vec2 p) { return p.x * p.x; }) ==
        doctest::Approx(M_PI / 4).epsilon(1e-8));
  // Cell runs partition the point list in order.
  REQUIRE(r.n_cells() > 0);
  CHECK(r.cell_begin(0) == 0);
  CHECK(r.cell_end(r.n_cells() - 1) == r.size());
  for (size_t k = 0; k + 1 < r.n_cells(); ++k)
    CHECK(r.cell_end(k) == r.cell_begin(k + 1));
}

TEST_CASE("domain rule on a star matches the polar area formula") {
  auto d = Domain::star({1.0, 0.0, 0.15, 0.0, 0.05});
  const QuadRule r = domain_rule(*d, 0.1, 5);
  CHECK(r.total_weight() == doctest::Approx(d->area_hint()).epsilon(1e-8));
  // Size field refinement only adds points, never changes the value.
  const QuadRule r2 = domain_rule(*d, 0.1, 5, [](Vec2 p) {
    return (p.x > 0 && std::abs(p.y) < 0.3) ? 0.03 : 0.0;
  });
  CHECK(r2.size() > r.size());
  CHECK(r2.total_weight() == doctest::Approx(d->area_hint()).epsilon(1e-8));
}

TEST_CASE("ball-domain rule matches the two-circle lens area") {
  auto d = Domain::disk(1.0);
  const Vec2 c{0.8, 0.0};
  const double R = 0.5;
  const QuadRule r = ball_domain_rule(*d, c, R, 24, 512);
  // Lens area of circles (r1 = 1 at origin) and (r2 = R at distance dd).
  const double dd = 0.8, r1 = 1.0, r2 = R;
  const double a1 = std::acos((dd * dd + r1 * r1 - r2 * r2) / (2 * dd * r1));
  const double a2 = std::acos((dd * dd + r2 * r2 - r1 * r1) / (2 * dd * r2));
  const double lens = r1 * r1 * (a1 - 0.5 * std::sin(2 * a1)) +
                      r2 * r2 * (a2 - 0.5 * std::sin(2 * a2));
  CHECK(r.total_weight() == doctest::Approx(lens).epsilon(2e-4));

  // Fully interior ball: exact ball moments again.
  const QuadRule ri = ball_domain_rule(*d, {0.1, 0.2}, 0.3, 8, 64);
  CHECK(ri.total_weight() == doctest::Approx(M_PI * 0.09).epsilon(1e-12));
}

TEST_CASE("boundary rule integrates over the full arc") {
  auto d = Domain::star({1.0, 0.0, 0.2});
  const BoundaryRule br = boundary_rule(*d, 64, 4);
  double len = 0, xint = 0;
  for (size_t i = 0; i < br.size(); ++i) {
    len += br.w[i];
    xint += br.w[i] * d->boundary_point(br.s[i]).y;
  }
  CHECK(len == doctest::Approx(d->arc_length()).epsilon(1e-12));
  CHECK(xint == doctest::Approx(0.0).epsilon(1e-8));  // up-down symmetry
}
