// Copyright (c) 2026 the pumice authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <random>

#include "pumice/partition.hpp"

using namespace pumice;

namespace {

std::shared_ptr<PartitionOfUnity> make_pu(std::shared_ptr<Domain> dom,
                                          double h) {
  auto cov = std::make_shared<Covering>(build_covering(dom, h));
  return std::make_shared<PartitionOfUnity>(cov);
}

}  // namespace

TEST_CASE("quintic step endpoints and smoothness") {
  CHECK(quintic_step(0) == 0);
  CHECK(quintic_step(1) == 1);
  CHECK(quintic_step(0.5) == doctest::Approx(0.5));
  CHECK(quintic_step_d1(0) == 0);
  CHECK(quintic_step_d1(1) == 0);
  CHECK(quintic_step_d2(1e-9) == doctest::Approx(0).epsilon(1e-6));
  const double e = 1e-6;
  CHECK(quintic_step_d1(0.3) ==
        doctest::Approx((quintic_step(0.3 + e) - quintic_step(0.3 - e)) / (2 * e))
            .epsilon(1e-7));
}

TEST_CASE("partition of unity sums to one with vanishing gradient sum") {
  auto dom = Domain::disk(1.0);
  auto pu = make_pu(dom, 0.2);
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> u(-1, 1);
  PartitionOfUnity::Active act;
  int tested = 0;
  while (tested < 200) {
    const Vec2 p{u(rng), u(rng)};
    if (!dom->inside(p)) continue;
    ++tested;
    pu->eval(p, act);
    REQUIRE(!act.idx.empty());
    Jet2 s = Jet2::constant(0.0);
    for (const Jet2& f : act.phi) {
      CHECK(f.v >= -1e-14);
      CHECK(f.v <= 1 + 1e-14);
      s += f;
    }
    CHECK(s.v == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.grad().norm() < 1e-9);
    CHECK(std::abs(s.hxx) + std::abs(s.hxy) + std::abs(s.hyy) < 1e-6);
  }
}

TEST_CASE("each patch function is exactly one on its clearance ball") {
  auto dom = Domain::star({1.0, 0.0, 0.15});
  auto pu = make_pu(dom, 0.25);
  const Covering& cov = pu->covering();
  for (int j = 0; j < (int)cov.size(); j += 7) {
    const Patch& p = cov.patch(j);
    for (double fr : {0.0, 0.5, 0.95})
      for (double th : {0.3, 2.1, 4.4}) {
        const Vec2 x = p.x + Vec2(std::cos(th), std::sin(th)) * (fr * p.rho);
        const Jet2 f = pu->jet(j, x);
        CHECK(f.v == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(f.grad().norm() < 1e-12);
      }
    // And vanishes outside the support ball.
    CHECK(pu->value(j, p.x + Vec2(p.R * 1.0001, 0)) == 0);
    CHECK(pu->value(j, p.x + Vec2(0, -p.R * 2)) == 0);
  }
}

TEST_CASE("analytic gradient and hessian match finite differences") {
  auto dom = Domain::disk(1.0);
  auto pu = make_pu(dom, 0.3);
  const double e = 1e-6;
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  int tested = 0;
  while (tested < 40) {
    const Vec2 p{u(rng), u(rng)};
    if (!dom->inside(p)) continue;
    PartitionOfUnity::Active act;
    pu->eval(p, act);
    // Pick the largest contributor; probe it by index.
    int j = act.idx[0];
    double best = -1;
    for (size_t k = 0; k < act.idx.size(); ++k)
      if (act.phi[k].v > best) {
        best = act.phi[k].v;
        j = act.idx[k];
      }
    const Jet2 f = pu->jet(j, p);
    const double fxp = pu->value(j, {p.x + e, p.y});
    const double fxm = pu->value(j, {p.x - e, p.y});
    const double fyp = pu->value(j, {p.x, p.y + e});
    const double fym = pu->value(j, {p.x, p.y - e});
    CHECK(f.gx == doctest::Approx((fxp - fxm) / (2 * e)).epsilon(5e-5).scale(1.0));
    CHECK(f.gy == doctest::Approx((fyp - fym) / (2 * e)).epsilon(5e-5).scale(1.0));
    CHECK(f.hxx ==
          doctest::Approx((fxp - 2 * f.v + fxm) / (e * e)).epsilon(2e-3).scale(100.0));
    CHECK(f.hyy ==
          doctest::Approx((fyp - 2 * f.v + fym) / (e * e)).epsilon(2e-3).scale(100.0));
    ++tested;
  }
}

TEST_CASE("context evaluation matches the direct path") {
  auto dom = Domain::disk(1.0);
  auto pu = make_pu(dom, 0.25);
  const Vec2 c{0.3, -0.4};
  const double rad = 0.08;
  const auto ctx = pu->context(c, rad);
  PartitionOfUnity::Active a1, a2;
  for (double th : {0.1, 1.0, 2.5, 4.0, 5.5}) {
    const Vec2 p = c + Vec2(std::cos(th), std::sin(th)) * (0.9 * rad);
    pu->eval(p, a1);
    pu->eval(ctx, p, a2);
    REQUIRE(a1.idx == a2.idx);
    for (size_t k = 0; k < a1.idx.size(); ++k) {
      CHECK(a1.phi[k].v == doctest::Approx(a2.phi[k].v).epsilon(1e-15));
      CHECK(a1.phi[k].gx == doctest::Approx(a2.phi[k].gx).epsilon(1e-15));
    }
  }
}

TEST_CASE("verification report is clean on a valid cover") {
  auto dom = Domain::disk(1.0);
  auto pu = make_pu(dom, 0.3);
  const auto rep = pu->verify();
  CHECK(rep.ok());
  CHECK(rep.n_patches == (int)pu->size());
  CHECK(rep.partition_defect < 1e-10);
  CHECK(rep.flat_defect < 1e-12);
  CHECK(rep.support_leak == 0);
  CHECK(rep.eta_min > 1e-6);
  CHECK(rep.deriv_bounds[0] <= 1 + 1e-12);
  CHECK(rep.deriv_bounds[1] > 0.1);
  CHECK(rep.deriv_bounds[1] < 100);
  CHECK(rep.deriv_bounds[2] < 1e4);
  CHECK(!rep.to_json().empty());
}

TEST_CASE("overlapping clearance balls break the normalizer") {
  auto dom = Domain::disk(0.3);
  std::vector<Patch> patches;
  patches.push_back({{-0.05, 0}, 1.0, 0.2, false});
  patches.push_back({{0.05, 0}, 1.0, 0.2, false});
  auto cov = std::make_shared<Covering>(dom, 1.0, CoveringOptions{},
                                        std::move(patches));
  CHECK_THROWS_AS(PartitionOfUnity pu(cov), NormalizationFailure);
}

TEST_CASE("radial bump matches finite differences and saturates") {
  RadialBump rho({0.1, -0.2}, 0.3, 0.8);
  CHECK(rho.value({0.1, -0.2}) == 1.0);
  CHECK(rho.value({0.1, 0.05}) == 1.0);
  CHECK(rho.value({0.95, -0.2}) == 0.0);
  const Vec2 x{0.45, 0.15};
  DerivSet ds;
  rho.derivs(x, 2, ds);
  const double e = 1e-5;
  const auto v = [&](double ax, double ay) { return rho.value({ax, ay}); };
  CHECK(ds.at(1, 0) ==
        doctest::Approx((v(x.x + e, x.y) - v(x.x - e, x.y)) / (2 * e))
            .epsilon(1e-6));
  CHECK(ds.at(0, 1) ==
        doctest::Approx((v(x.x, x.y + e) - v(x.x, x.y - e)) / (2 * e))
            .epsilon(1e-6));
  CHECK(ds.at(2, 0) ==
        doctest::Approx((v(x.x + e, x.y) - 2 * v(x.x, x.y) + v(x.x - e, x.y)) /
                        (e * e))
            .epsilon(1e-4));
  CHECK(ds.at(0, 2) ==
        doctest::Approx((v(x.x, x.y + e) - 2 * v(x.x, x.y) + v(x.x, x.y - e)) /
                        (e * e))
            .epsilon(1e-4));
  CHECK(ds.at(1, 1) ==
        doctest::Approx((v(x.x + e, x.y + e) - v(x.x + e, x.y - e) -
                         v(x.x - e, x.y + e) + v(x.x - e, x.y - e)) /
                        (4 * e * e))
            .epsilon(1e-4));
  CHECK_THROWS_AS(rho.derivs(x, 3, ds), Error);
}

TEST_CASE("admissible sets capture where a patch group sums to one") {
  auto dom = Domain::disk(1.0);
  auto pu = make_pu(dom, 0.2);
  const Covering& cov = pu->covering();

  std::vector<int> all((int)cov.size());
  std::iota(all.begin(), all.end(), 0);
  const AdmissibleSet full = admissible_from_indices(*pu, all);
  CHECK(full.region.area() > 0.9 * M_PI);
  CHECK(full.region.contains({0, 0}));

  CHECK(admissible_from_indices(*pu, {}).region.cell_count() == 0);

  int j0 = 0;
  for (int j = 1; j < (int)cov.size(); ++j)
    if (cov.patch(j).x.norm() < cov.patch(j0).x.norm()) j0 = j;
  const AdmissibleSet one = admissible_from_indices(*pu, {j0}, 0.004);
  const Patch& p0 = cov.patch(j0);
  REQUIRE(one.region.cell_count() > 0);
  CHECK(one.region.contains_disk(p0.x, 0.5 * p0.rho));
  for (const Box2& b : one.region.cell_boxes())
    CHECK(distance(b.center(), p0.x) < p0.rho);
}

TEST_CASE("admissible ladders nest and respect the boundary gap") {
  auto dom = Domain::disk(1.0);
  auto pu = make_pu(dom, 0.1);

  const auto lad = admissible_ladder(*pu, {0, 0}, 0.15, 1);
  REQUIRE(lad.size() == 3);
  CHECK(lad[0].region.contains_disk({0, 0}, 0.15));
  for (size_t i = 0; i + 1 < lad.size(); ++i) {
    CHECK(lad[i].region.subset_of(lad[i + 1].region));
    CHECK(std::includes(lad[i + 1].J.begin(), lad[i + 1].J.end(),
                        lad[i].J.begin(), lad[i].J.end()));
  }
  double max_r0 = 0;
  for (const Box2& b : lad[0].region.cell_boxes())
    max_r0 = std::max(max_r0, b.center().norm());
  CHECK(max_r0 < 0.30);
  CHECK(lad[1].region.contains_disk({0, 0}, 0.36));

  const auto degenerate = admissible_ladder(*pu, {0, 0}, 0.2, 0);
  CHECK(degenerate.size() == 2);
  CHECK(degenerate[1].J.size() == pu->size());

  CHECK_THROWS_AS(admissible_ladder(*pu, {0, 0}, 0.2, 5),
                  InfeasibleParameters);
  CHECK_THROWS_AS(admissible_ladder(*pu, {0.5, 0}, 0.8, 1),
                  InfeasibleParameters);
}

TEST_CASE("gaussian bump derivatives match finite differences") {
  GaussianBump g({0.2, -0.1}, 0.4);
  const Vec2 x{0.35, 0.1};
  DerivSet ds;
  g.derivs(x, 3, ds);
  const double e = 1e-4;
  const auto v = [&](double ax, double ay) { return g.value({ax, ay}); };
  CHECK(ds.at(0, 0) == doctest::Approx(v(x.x, x.y)));
  CHECK(ds.at(1, 0) ==
        doctest::Approx((v(x.x + e, x.y) - v(x.x - e, x.y)) / (2 * e))
            .epsilon(1e-7));
  CHECK(ds.at(0, 2) ==
        doctest::Approx((v(x.x, x.y + e) - 2 * v(x.x, x.y) + v(x.x, x.y - e)) /
                        (e * e))
            .epsilon(1e-6));
  CHECK(ds.at(2, 1) ==
        doctest::Approx((v(x.x + e, x.y + e) - 2 * v(x.x, x.y + e) +
                         v(x.x - e, x.y + e) - v(x.x + e, x.y - e) +
                         2 * v(x.x, x.y - e) - v(x.x - e, x.y - e)) /
                        (2 * e * e * e))
            .epsilon(1e-4));
}
