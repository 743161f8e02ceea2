// Copyright (c) 2026 the pumice authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "pumice/covering.hpp"

using namespace pumice;

TEST_CASE("disk covering satisfies the construction guarantees") {
  auto dom = Domain::disk(1.0);
  const double h = 0.2;
  const Covering cov = build_covering(dom, h);
  CHECK(cov.size() > 50);

  double min_sep = 1e9;
  for (size_t i = 0; i < cov.size(); ++i) {
    const Patch& p = cov.patch((int)i);
    CHECK(p.R == doctest::Approx(0.5 * h));
    // Clearance ball stays inside the domain.
    CHECK(dom->signed_depth(p.x) >= p.rho);
    for (size_t j = i + 1; j < cov.size(); ++j)
      min_sep = std::min(min_sep, distance(p.x, cov.patch((int)j).x));
  }
  // Clearance balls are pairwise disjoint.
  CHECK(min_sep > 2 * cov.flat_radius());
  CHECK(min_sep >= 0.41 * h);

  CHECK(cov.radius_ratio() == doctest::Approx(1.0));
  const int k = cov.max_overlap();
  CHECK(k >= 2);
  CHECK(k <= 12);
}

TEST_CASE("covering is deterministic for a fixed seed") {
  auto dom = Domain::star({1.0, 0.0, 0.2});
  const Covering a = build_covering(dom, 0.25);
  const Covering b = build_covering(dom, 0.25);
  CHECK(a.to_json() == b.to_json());
  CoveringOptions o2;
  o2.seed = 999;
  const Covering c = build_covering(dom, 0.25, o2);
  CHECK(a.to_json() != c.to_json());
  CHECK(a.size() == doctest::Approx((double)c.size()).epsilon(0.15));
}

TEST_CASE("covering round-trips through json") {
  auto dom = Domain::disk(1.0);
  const Covering a = build_covering(dom, 0.3);
  const Covering b = Covering::from_json(a.to_json(), dom);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a.patch((int)i).x.x == b.patch((int)i).x.x);
    CHECK(a.patch((int)i).R == b.patch((int)i).R);
    CHECK(a.patch((int)i).on_ring == b.patch((int)i).on_ring);
  }
}

TEST_CASE("overlap queries agree with brute force") {
  auto dom = Domain::disk(1.0);
  const Covering cov = build_covering(dom, 0.3);
  std::vector<int> got;
  for (Vec2 p : {Vec2{0, 0}, Vec2{0.5, 0.3}, Vec2{-0.8, 0.1}, Vec2{0.2, -0.9}}) {
    cov.overlapping(p, got);
    std::vector<int> want;
    for (size_t j = 0; j < cov.size(); ++j)
      if (distance(p, cov.patch((int)j).x) < cov.patch((int)j).R)
        want.push_back((int)j);
    CHECK(got == want);
  }
}

TEST_CASE("infeasible parameters are rejected up front") {
  auto dom = Domain::disk(1.0);
  CoveringOptions o;
  o.sigma = 0.125;  // the profile feasibility bound requires sigma < 1/8
  CHECK_THROWS_AS(build_covering(dom, 0.2, o), InfeasibleParameters);
  CoveringOptions o2;
  o2.flat_factor = 0.23;  // clearance must stay below the ring depth
  CHECK_THROWS_AS(build_covering(dom, 0.2, o2), InfeasibleParameters);
  // Offset depth beyond the reach of a strongly wiggly boundary.
  auto wig = Domain::star({1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.12});
  CHECK_THROWS_AS(build_covering(wig, 1.5), InfeasibleParameters);
}

TEST_CASE("cusp cannot be covered and the witness approaches the tip") {
  auto dom = Domain::cusp();
  double prev_witness = 1e9;
  for (double h : {0.2, 0.1, 0.05}) {
    try {
      build_covering(dom, h);
      FAIL("covering unexpectedly succeeded at h = " << h);
    } catch (const CoverageFailure& f) {
      CHECK(!f.uncovered.empty());
      const double wr = f.witness.norm();
      CHECK(wr < 0.75 * prev_witness + 1e-9);
      CHECK(wr < 3.0 * std::sqrt(h));
      prev_witness = wr;
    }
  }
}

TEST_CASE("grid masks: area, erosion, subset") {
  auto dom = Domain::disk(1.0);
  const GridMask m = interior_mask(*dom, 0.2, 0.05);
  // Conservative subset of the clearance region with most of its area.
  CHECK(m.area() < M_PI * 0.8 * 0.8);
  // Erosion peels roughly two pitch layers off the ideal radius-0.8 region.
  CHECK(m.area() > M_PI * 0.7 * 0.7);
  for (const Box2& b : m.cell_boxes()) {
    CHECK(dom->signed_depth(b.center()) >= 0.2);
    CHECK(m.contains(b.center()));
  }
  const GridMask e = m.eroded(2);
  CHECK(e.subset_of(m));
  CHECK(e.area() < m.area());

  const GridMask dm = disk_mask(dom->bbox(), 0.05, {0.1, 0}, 0.5);
  CHECK(dm.area() > 0.8 * M_PI * 0.25);
  CHECK(dm.area() < M_PI * 0.25);
  CHECK(dm.contains({0.1, 0}));
  CHECK(!dm.contains({0.7, 0}));
}

TEST_CASE("disk ladder is nested") {
  auto dom = Domain::disk(1.0);
  const auto rungs = disk_ladder(*dom, {0, 0}, 0.5, 0.35, 3, 0.02);
  REQUIRE(rungs.size() == 4);
  for (size_t i = 1; i < rungs.size(); ++i) {
    CHECK(rungs[i].subset_of(rungs[i - 1]));
    CHECK(rungs[i].area() < rungs[i - 1].area());
  }
  CHECK(rungs.back().area() > 0.8 * M_PI * 0.35 * 0.35);
}

TEST_CASE("mask disk containment matches the marked cells") {
  const GridMask m = disk_mask({{-1, -1}, {1, 1}}, 0.05, {0, 0}, 0.8);
  CHECK(m.contains_disk({0, 0}, 0.5));
  CHECK(m.contains_disk({0.2, 0.1}, 0.2));
  CHECK(!m.contains_disk({0.7, 0}, 0.3));
  CHECK(!m.contains_disk({2.0, 0}, 0.1));
}
