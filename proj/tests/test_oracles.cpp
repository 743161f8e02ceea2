// Copyright (c) 2026 the pumice authors
// SPDX-License-Identifier: Apache-2.0

#include "pumice/oracles.hpp"

#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "doctest.h"
#include "pumice/assembly.hpp"
#include "pumice/norms.hpp"
#include "pumice/partition.hpp"
#include "pumice/polynomial.hpp"

namespace {

using namespace pumice;

std::shared_ptr<GfemSpace> disk_space(double h, int degree) {
  auto cov = std::make_shared<Covering>(build_covering(Domain::disk(1.0), h, {}));
  auto pu = std::make_shared<PartitionOfUnity>(cov);
  return std::make_shared<GfemSpace>(pu, degree);
}

TEST_CASE("smooth data reproduces the matching harmonic polynomial") {
  NeumannData g;
  g.density = [](double th) { return std::cos(th); };
  const HarmonicSeries u = neumann_solution(g, 64);

  CHECK(u.cos_coeff(1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(u.sin_coeff(1)) <= 1e-12);
  CHECK(std::abs(u.cos_coeff(0)) <= 1e-13);
  CHECK(std::abs(u.cos_coeff(2)) <= 1e-12);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ud(-0.6, 0.6);
  for (int k = 0; k < 50; ++k) {
    const Vec2 x{ud(rng), ud(rng)};
    CHECK(u.value(x) == doctest::Approx(x.x).epsilon(1e-12));
    const Vec2 gr = u.grad(x);
    CHECK(gr.x == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(gr.y) <= 1e-12);
  }

  bool div = true;
  const double n3 = series_sobolev_norm(u, 3.0, &div);
  CHECK_FALSE(div);
  CHECK(std::isfinite(n3));

  NeumannData bad;
  bad.density = [](double) { return 1.0; };
  CHECK_THROWS_AS(neumann_solution(bad, 64), CompatibilityError);
}

TEST_CASE("log pole closed form, series, and data agree") {
  const double th0 = 0.8;
  const BoundaryCase lp = log_pole(th0, 1.0, 400);
  const Vec2 y0{std::cos(th0), std::sin(th0)};

  HarmonicSeries bare = lp.exact;
  bare.closed_form = nullptr;

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> ud(-0.35, 0.35);
  for (int k = 0; k < 100; ++k) {
    const Vec2 x{ud(rng), ud(rng)};
    const double closed = lp.exact.value(x);
    const double direct = -std::log((x - y0).norm()) / M_PI;
    CHECK(closed == doctest::Approx(direct).epsilon(1e-12));
    CHECK(bare.value(x) == doctest::Approx(closed).epsilon(1e-8));
    const Vec2 gc = lp.exact.grad(x), gs = bare.grad(x);
    CHECK(gs.x == doctest::Approx(gc.x).epsilon(1e-8));
    CHECK(gs.y == doctest::Approx(gc.y).epsilon(1e-8));
  }

  const HarmonicSeries recon = neumann_solution(lp.data, 300);
  for (int n = 1; n <= 300; ++n) {
    CHECK(recon.cos_coeff(n) ==
          doctest::Approx(lp.exact.cos_coeff(n)).epsilon(1e-10));
    CHECK(recon.sin_coeff(n) ==
          doctest::Approx(lp.exact.sin_coeff(n)).epsilon(1e-10));
  }

  HarmonicSeries trunc = log_pole(th0, 1.0, 200).exact;
  trunc.closed_form = nullptr;
  const std::function<Jet2(Vec2)> diff = [&](Vec2 x) {
    return lp.exact.jet(x) + trunc.jet(x) * -1.0;
  };
  const QuadRule half = disk_region_rule({0, 0}, 0.5, 0.02);
  CHECK(hs_norm(diff, half, 1) <= 1e-10);
}

TEST_CASE("dipole closed form, series, and data agree") {
  const double th0 = 2.1;
  const BoundaryCase dp = dipole(th0, 0.7, 400);

  HarmonicSeries bare = dp.exact;
  bare.closed_form = nullptr;

  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> ud(-0.35, 0.35);
  for (int k = 0; k < 100; ++k) {
    const Vec2 x{ud(rng), ud(rng)};
    CHECK(bare.value(x) == doctest::Approx(dp.exact.value(x)).epsilon(1e-8));
  }

  const HarmonicSeries recon = neumann_solution(dp.data, 300);
  for (int n = 1; n <= 300; ++n) {
    CHECK(recon.cos_coeff(n) ==
          doctest::Approx(dp.exact.cos_coeff(n)).epsilon(1e-10));
    CHECK(recon.sin_coeff(n) ==
          doctest::Approx(dp.exact.sin_coeff(n)).epsilon(1e-10));
  }
}

TEST_CASE("series evaluations are harmonic by finite differences") {
  const BoundaryCase lp = log_pole(0.3);
  NeumannData smooth;
  smooth.density = [](double th) { return std::cos(2 * th) + 0.5 * std::sin(3 * th); };
  const HarmonicSeries us = neumann_solution(smooth, 128);

  const double fd = 1e-3;
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> ud(-0.25 / std::sqrt(2.0),
                                            0.25 / std::sqrt(2.0));
  for (const SmoothFn* f : {(const SmoothFn*)&lp.exact, (const SmoothFn*)&us}) {
    for (int k = 0; k < 25; ++k) {
      const Vec2 x{ud(rng), ud(rng)};
      const double lap =
          (f->value({x.x + fd, x.y}) + f->value({x.x - fd, x.y}) +
           f->value({x.x, x.y + fd}) + f->value({x.x, x.y - fd}) -
           4 * f->value(x)) /
          (fd * fd);
      CHECK(std::abs(lap) <= 1e-6 * std::max(1.0, std::abs(f->value(x))));
    }
  }
}

TEST_CASE("radial derivative recovers the boundary data near the rim") {
  NeumannData g;
  g.density = [](double th) { return std::cos(2 * th) + 0.5 * std::sin(3 * th); };
  const HarmonicSeries u = neumann_solution(g, 128);

  const double r0 = 1 - 1e-4;
  const int M = 2048;
  double p2 = 0, q3 = 0;
  for (int k = 0; k < M; ++k) {
    const double th = 2 * M_PI * k / M;
    const Vec2 x{r0 * std::cos(th), r0 * std::sin(th)};
    const Vec2 gr = u.grad(x);
    const double dr = gr.x * std::cos(th) + gr.y * std::sin(th);
    p2 += dr * std::cos(2 * th);
    q3 += dr * std::sin(3 * th);
  }
  p2 *= 2.0 / M;
  q3 *= 2.0 / M;
  CHECK(p2 == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(q3 == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("sobolev norms flag the regularity thresholds") {
  const BoundaryCase lp = log_pole(0.8);
  bool div = false;
  CHECK(std::isfinite(series_sobolev_norm(lp.exact, 0.75, &div)));
  CHECK_FALSE(div);
  CHECK(std::isinf(series_sobolev_norm(lp.exact, 1.0, &div)));
  CHECK(div);

  const BoundaryCase dp = dipole(0.8);
  CHECK(std::isfinite(series_sobolev_norm(dp.exact, -0.25, &div)));
  CHECK_FALSE(div);
  CHECK(std::isinf(series_sobolev_norm(dp.exact, 0.0, &div)));
  CHECK(div);

  CHECK(series_sobolev_norm(lp.exact, 0.5) <
        series_sobolev_norm(lp.exact, 0.75));
}

TEST_CASE("interior error of an exactly represented solution vanishes") {
  auto space = disk_space(0.15, 1);
  NeumannData g;
  g.density = [](double th) { return std::cos(th); };
  const HarmonicSeries u = neumann_solution(g, 64);
  GfemFunction uS{space, space->polynomial_coeffs(
                             Poly2::monomial(1, 0, {0, 0}, 1))};

  const auto lad = admissible_ladder(*space->pu_ptr(), {0, 0}, 0.25, 0);
  CHECK(interior_h1_error(u, uS, lad[0]) <= 1e-8);

  GfemFunction v = uS;
  int central = 0;
  for (int j = 0; j < space->n_patches(); ++j)
    if (space->covering().patch(j).x.norm() <
        space->covering().patch(central).x.norm())
      central = j;
  v.c[space->dof(central, 0)] += 1e-3;
  const double small = interior_h1_error(u, v, lad[0]);
  const double big = interior_h1_error(u, v, lad[1]);
  CHECK(small > 1e-6);
  CHECK(small <= big * (1 + 1e-12));
}

TEST_CASE("series-only rim evaluation raises the slow-convergence warning") {
  auto space = disk_space(0.15, 1);
  std::vector<int> all(space->n_patches());
  for (int j = 0; j < (int)all.size(); ++j) all[j] = j;
  const AdmissibleSet whole =
      admissible_from_indices(*space->pu_ptr(), all);

  BoundaryCase lp = log_pole(0.4);
  GfemFunction uS{space, Eigen::VectorXd::Zero(space->size())};

  HarmonicSeries bare = lp.exact;
  bare.closed_form = nullptr;
  CHECK_THROWS_AS(interior_h1_error(bare, uS, whole), SlowConvergenceWarning);
  CHECK(std::isfinite(interior_h1_error(lp.exact, uS, whole)));
}

}  // namespace
