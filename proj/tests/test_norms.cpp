// Copyright (c) 2026 the pumice authors
// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"

#include <cmath>
#include <limits>
#include <memory>

#include "pumice/assembly.hpp"
#include "pumice/covering.hpp"
#include "pumice/norms.hpp"
#include "pumice/partition.hpp"
#include "pumice/polynomial.hpp"
#include "pumice/quadrature.hpp"

namespace {

using namespace pumice;

struct ConstFn : SmoothFn {
  double v = 1;
  explicit ConstFn(double val) : v(val) {}
  void derivs(Vec2, int order, DerivSet& out) const override {
    out = DerivSet{};
    out.order = order;
    out.at(0, 0) = v;
  }
};

struct CoordFn : SmoothFn {
  void derivs(Vec2 x, int order, DerivSet& out) const override {
    out = DerivSet{};
    out.order = order;
    out.at(0, 0) = x.x;
    if (order >= 1) out.at(1, 0) = 1;
  }
};

struct PolyFn : SmoothFn {
  Poly2 p;
  explicit PolyFn(Poly2 q) : p(std::move(q)) {}
  void derivs(Vec2 x, int order, DerivSet& out) const override {
    REQUIRE(order <= 2);
    out = DerivSet{};
    out.order = order;
    const Jet2 j = p.jet(x);
    out.at(0, 0) = j.v;
    if (order >= 1) {
      out.at(1, 0) = j.gx;
      out.at(0, 1) = j.gy;
    }
    if (order >= 2) {
      out.at(2, 0) = j.hxx;
      out.at(1, 1) = j.hxy;
      out.at(0, 2) = j.hyy;
    }
  }
};

std::shared_ptr<GfemSpace> disk_space(double h, int degree) {
  auto cov = std::make_shared<Covering>(build_covering(Domain::disk(1.0), h, {}));
  auto pu = std::make_shared<PartitionOfUnity>(cov);
  return std::make_shared<GfemSpace>(pu, degree);
}

TEST_CASE("interior Sobolev norms match closed forms on the disk") {
  const QuadRule rule = polar_ball_rule({0, 0}, 1.0, 48, 96);

  const ConstFn one(1.0);
  CHECK(hs_norm(one, rule, 0) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
  CHECK(hs_norm(one, rule, 3) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));

  const CoordFn fx;
  const double l2 = std::sqrt(M_PI / 4);
  const double h1 = std::sqrt(M_PI / 4 + M_PI);
  CHECK(hs_norm(fx, rule, 0) == doctest::Approx(l2).epsilon(1e-11));
  CHECK(hs_norm(fx, rule, 1) == doctest::Approx(h1).epsilon(1e-11));
  CHECK(hs_norm(fx, rule, 2) == doctest::Approx(h1).epsilon(1e-11));
  CHECK(hs_norm(fx, rule, 1) >= hs_norm(fx, rule, 0));

  const QuadRule half = polar_ball_rule({0, 0}, 0.5, 32, 64);
  CHECK(hs_norm(fx, half, 1) < hs_norm(fx, rule, 1));
  CHECK_THROWS_AS(hs_norm(fx, rule, 4), Error);

  auto space = disk_space(0.2, 2);
  GfemFunction u{space, space->polynomial_coeffs(Poly2::monomial(1, 0, {0, 0}, 1))};
  const QuadRule inner = polar_ball_rule({0, 0}, 0.8, 40, 80);
  const double l2i = std::sqrt(M_PI * 0.8 * 0.8 * 0.8 * 0.8 / 4);
  const double h1i = std::sqrt(l2i * l2i + M_PI * 0.8 * 0.8);
  CHECK(hs_norm(u, inner, 0) == doctest::Approx(l2i).epsilon(1e-6));
  CHECK(hs_norm(u, inner, 1) == doctest::Approx(h1i).epsilon(1e-6));
}

TEST_CASE("error norms vanish on represented polynomials") {
  auto space = disk_space(0.15, 2);
  Poly2 p = Poly2::monomial(2, 0, {0, 0}, 1);
  p += Poly2::monomial(0, 2, {0, 0}, 1) * -1.0;
  p += Poly2::monomial(1, 1, {0, 0}, 1) * 0.3;
  GfemFunction u{space, space->polynomial_coeffs(p)};
  const PolyFn ref(p);

  const QuadRule rule = polar_ball_rule({0, 0}, 0.9, 48, 96);
  const ErrorNorms zero = error_norms(u, ref, rule);
  CHECK(zero.l2 <= 1e-10);
  CHECK(zero.h1_semi <= 1e-8);
  CHECK(zero.h1() <= 1e-8);

  GfemFunction v = u;
  int central = 0;
  for (int j = 0; j < space->n_patches(); ++j)
    if (space->covering().patch(j).x.norm() <
        space->covering().patch(central).x.norm())
      central = j;
  v.c[space->dof(central, 0)] += 1e-3;
  const ErrorNorms off = error_norms(v, ref, rule);
  CHECK(off.l2 > 1e-6);
  CHECK(off.h1() >= off.h1_semi);

  const ErrorNorms self = error_norms(u, u, rule);
  CHECK(self.l2 == 0.0);

  const auto lad = admissible_ladder(*space->pu_ptr(), {0, 0}, 0.3, 0);
  const QuadRule rr = region_rule(lad[0]);
  CHECK(rr.total_weight() == doctest::Approx(lad[0].region.area()).epsilon(1e-12));
  const ErrorNorms reg = error_norms(u, ref, rr);
  CHECK(reg.l2 <= 1e-10);
}

TEST_CASE("dual norms obey self-duality, monotonicity, and Cauchy-Schwarz") {
  const Vec2 c{0.1, 0.0};
  const double r = 0.7;
  const QuadRule rule = disk_region_rule(c, r, 0.02);

  SUBCASE("a member of the test family is measured exactly at order zero") {
    SobolevGram g0(rule, c, r, 0, 10, false);
    Poly2 p = Poly2::monomial(1, 1, {0, 0}, 1);
    const PolyFn pf(p);
    const double dual = g0.dual_norm([&](Vec2 x) { return pf.value(x); });
    const double l2 = hs_norm(pf, rule, 0);
    CHECK(dual == doctest::Approx(l2).epsilon(1e-9));
  }

  SUBCASE("self-duality and the upper bound for a generic function") {
    const GaussianBump f({0.05, -0.1}, 0.3);
    SobolevGram g0(rule, c, r, 0, 10, false);
    auto feval = [&](Vec2 x) { return f.value(x); };
    const double dual = g0.dual_norm(feval);
    const double l2 = hs_norm(f, rule, 0);
    CHECK(dual <= l2 * (1 + 1e-10));
    CHECK(dual >= 0.99 * l2);
  }

  SUBCASE("raising the test degree only grows the value") {
    const GaussianBump f({0.05, -0.1}, 0.3);
    auto feval = [&](Vec2 x) { return f.value(x); };
    double prev = 0;
    for (int N : {4, 8, 12}) {
      SobolevGram g(rule, c, r, 1, N, false);
      const double d = g.dual_norm(feval);
      CHECK(d >= prev - 1e-12);
      prev = d;
    }
  }

  SUBCASE("Cauchy-Schwarz against every test function, both flavors") {
    const GaussianBump f({0.05, -0.1}, 0.3);
    auto feval = [&](Vec2 x) { return f.value(x); };
    for (bool compact : {false, true}) {
      SobolevGram g(rule, c, r, 1, 8, compact);
      const Eigen::VectorXd b = g.pairings(feval);
      const double dual = g.dual_norm_from(b);
      CHECK(dual > 0);
      for (int i = 0; i < g.n_tests(); ++i) {
        const double ni = std::sqrt(g.gram()(i, i));
        CHECK(std::abs(b[i]) <= dual * ni * (1 + 1e-10));
      }
    }
  }

  SUBCASE("the compact flavor stays below the plain L2 bound") {
    const GaussianBump f({0.05, -0.1}, 0.3);
    SobolevGram g0(rule, c, r, 0, 10, true);
    const double dual = g0.dual_norm([&](Vec2 x) { return f.value(x); });
    CHECK(dual > 0);
    CHECK(dual <= hs_norm(f, rule, 0) * (1 + 1e-10));
  }

  SUBCASE("a family sampled on a sliver of its box degenerates") {
    const QuadRule tiny = polar_ball_rule({0, 0}, 0.02, 8, 16);
    CHECK_THROWS_AS(SobolevGram(tiny, Box2{{-1, -1}, {1, 1}}, 0, 10),
                    DegenerateBasis);
  }
}

TEST_CASE("dual norm over an admissible region") {
  auto space = disk_space(0.15, 1);
  const auto lad = admissible_ladder(*space->pu_ptr(), {0, 0}, 0.3, 0);
  const GaussianBump f({0.0, 0.1}, 0.25);
  auto feval = [&](Vec2 x) { return f.value(x); };
  const double d1 = dual_norm(feval, lad[0], 1);
  CHECK(d1 > 0);
  const QuadRule rr = region_rule(lad[0]);
  CHECK(d1 <= hs_norm(f, rr, 0) * (1 + 1e-10));
}

TEST_CASE("boundary Fourier norms on the circle") {
  auto cos1 = [](double th) { return std::cos(th); };
  CHECK(boundary_fourier_norm(cos1, 0.0) ==
        doctest::Approx(std::sqrt(M_PI)).epsilon(1e-10));
  NeumannData d;
  d.density = cos1;
  CHECK(boundary_fourier_norm(d, 0.0) ==
        doctest::Approx(std::sqrt(M_PI)).epsilon(1e-10));
  CHECK(boundary_fourier_norm(cos1, 1.0) ==
        doctest::Approx(std::sqrt(2 * M_PI)).epsilon(1e-10));

  NeumannData atom;
  atom.atoms.push_back({0.7, 0, 1.0});
  const double a256 = boundary_fourier_norm(atom, -1.0, 256);
  const double a512 = boundary_fourier_norm(atom, -1.0, 512);
  CHECK(a512 == doctest::Approx(a256).epsilon(2e-3));
  CHECK(boundary_fourier_norm(atom, 0.0, 512) >
        1.3 * boundary_fourier_norm(atom, 0.0, 256));
  CHECK(boundary_fourier_norm(atom, -1.0, 256) <=
        boundary_fourier_norm(atom, -0.5, 256));

  NeumannData smeared;
  const double eps = 0.01, th0 = 0.7;
  smeared.density = [=](double th) {
    double u = std::remainder(th - th0, 2 * M_PI) / eps;
    if (std::abs(u) >= 1) return 0.0;
    return (1 + std::cos(M_PI * u)) / (2 * eps);
  };
  CHECK(boundary_fourier_norm(smeared, -1.0, 256) ==
        doctest::Approx(a256).epsilon(1e-2));

  NeumannData dip;
  dip.atoms.push_back({0.7, 1, 1.0});
  CHECK(std::isfinite(boundary_fourier_norm(dip, -2.0, 512)));
  CHECK(boundary_fourier_norm(dip, -2.0, 512) > 0);
}

TEST_CASE("plane Fourier norms integrate radial profiles") {
  auto unit = [](double) { return 1.0; };
  const double eps = 0.1;
  CHECK(fourier_norm_plane(unit, -1 - eps) ==
        doctest::Approx(std::sqrt(1 / (4 * M_PI * eps))).epsilon(1e-6));

  auto gauss = [](double rho) { return 2 * M_PI * std::exp(-rho * rho / 2); };
  CHECK(fourier_norm_plane(gauss, 0.0) ==
        doctest::Approx(std::sqrt(M_PI)).epsilon(1e-10));

  CHECK(std::isinf(fourier_norm_plane(unit, 0.0)));
  CHECK(std::isinf(fourier_norm_plane(unit, -1.0)));

  double prev = 0;
  for (double w : {0.5, 0.25, 0.125}) {
    auto moll = [w](double rho) { return std::exp(-w * w * rho * rho / 2); };
    const double v = fourier_norm_plane(moll, -1 - eps);
    CHECK(std::isfinite(v));
    CHECK(v > prev);
    prev = v;
  }
  CHECK(prev < std::sqrt(1 / (4 * M_PI * eps)));
}

TEST_CASE("space Gram inverse estimates") {
  auto coarse = disk_space(0.2, 1);
  auto fine = disk_space(0.14, 1);
  const HsGrams gc = build_hs_grams(*coarse);
  const HsGrams gf = build_hs_grams(*fine);

  CHECK(inverse_constant(gc, 0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(inverse_constant(gc, 2, 2) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(inverse_constant(gc, 1, 0), Error);

  const double c01 = inverse_constant(gc, 0, 1);
  const double c02 = inverse_constant(gc, 0, 2);
  const double c12 = inverse_constant(gc, 1, 2);
  CHECK(c01 > 0.05);
  CHECK(c01 < 50);
  CHECK(c02 > 0.05);
  CHECK(c02 < 5000);
  CHECK(c12 > 0.05);
  CHECK(c12 < 5000);

  const double f01 = inverse_constant(gf, 0, 1);
  CHECK(f01 / c01 > 0.55);
  CHECK(f01 / c01 < 1.8);

  const double dc = dual_inverse_constant(gc, 1, 10);
  const double df = dual_inverse_constant(gf, 1, 10);
  CHECK(dc > 0.02);
  CHECK(df / dc > 0.5);
  CHECK(df / dc < 2.0);
  CHECK(dual_inverse_constant(gc, 0, 4) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("squared L2 norms add over disjoint regions") {
  const Box2 b1{{-0.5, -0.3}, {0.0, 0.3}};
  const Box2 b2{{0.1, -0.3}, {0.5, 0.3}};
  const GaussianBump f({0.0, 0.0}, 0.4);
  const double n1 = hs_norm(f, box_rule(b1, 6, 6), 0);
  const double n2 = hs_norm(f, box_rule(b2, 6, 6), 0);
  const double nu = hs_norm(f, cells_rule({b1, b2}, 6), 0);
  CHECK(nu * nu == doctest::Approx(n1 * n1 + n2 * n2).epsilon(1e-12));
}

}  // namespace
