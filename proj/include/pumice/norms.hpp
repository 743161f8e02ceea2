// Copyright (c) 2026 the pumice authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "pumice/assembly.hpp"
#include "pumice/covering.hpp"
#include "pumice/partition.hpp"
#include "pumice/quadrature.hpp"

namespace pumice {

// Sobolev norm of integer order s over the region carried by the rule,
// counting each partial derivative d^(p,q), p + q <= s, once. s <= 3 for
// smooth fields, s <= 2 where only a second-order jet is available.
double hs_norm(const SmoothFn& f, const QuadRule& rule, int s);
double hs_norm(const GfemFunction& f, const QuadRule& rule, int s);
double hs_norm(const std::function<Jet2(Vec2)>& f, const QuadRule& rule, int s);

struct ErrorNorms {
  double l2 = 0;
  double h1_semi = 0;
  double h1() const { return std::sqrt(l2 * l2 + h1_semi * h1_semi); }
};

// L2 and H1 distance between a discrete function and a reference over the
// region carried by the rule.
ErrorNorms error_norms(const GfemFunction& u, const SmoothFn& ref,
                       const QuadRule& rule);
ErrorNorms error_norms(const GfemFunction& u, const GfemFunction& ref,
                       const QuadRule& rule);

// Tensor Gauss cells over the marked grid cells of an admissible region.
QuadRule region_rule(const AdmissibleSet& A, int n1d = 3);

// Polar rule over B(c, r) with radial and angular spacing near `cell`.
QuadRule disk_region_rule(Vec2 c, double r, double cell);

// Negative-order Sobolev norms measured against a tensor Legendre test
// family: psi_(a,b) = P_a(xi_x) P_b(xi_y), a, b <= N, in the coordinates of
// the region's bounding box, optionally times a C^2 radial cutoff that
// vanishes at the rim of a region disk (the compactly supported flavor).
// The dual norm of f is sup (f, psi) / |psi|_{H^s} over the family, i.e.
// sqrt(b^T G^-1 b) with b_i = (f, psi_i) and G the H^s Gram of the family
// over the supplied rule. Raising N can only grow the value when the rule
// is kept fixed.
class SobolevGram {
 public:
  // Tests on the box `bbox`; `rule` carries the region (and must resolve
  // the integrands later paired against the family). Throws DegenerateBasis
  // when the family degenerates on the region, i.e. the smallest Gram
  // eigenvalue falls below 1e-12 of the largest.
  SobolevGram(QuadRule rule, Box2 bbox, int s, int N = 10);
  // Tests over the disk B(center, radius); compact = true multiplies every
  // test by a radial cutoff that is 1 up to 0.70 radius and 0 from 0.97
  // radius, so each test is compactly supported inside the disk.
  SobolevGram(QuadRule rule, Vec2 center, double radius, int s, int N,
              bool compact);

  int order() const { return s_; }
  int test_degree() const { return N_; }
  int n_tests() const { return (N_ + 1) * (N_ + 1); }
  const Eigen::MatrixXd& gram() const { return G_; }
  const QuadRule& rule() const { return rule_; }

  // Duality pairings b_i = (f, psi_i) by the stored rule.
  Eigen::VectorXd pairings(const std::function<double(Vec2)>& f) const;
  double dual_norm(const std::function<double(Vec2)>& f) const;
  double dual_norm_from(const Eigen::VectorXd& b) const;
  // H^s norm of the combination sum_i c_i psi_i over the region.
  double test_norm(const Eigen::VectorXd& c) const;
  double test_value(const Eigen::VectorXd& c, Vec2 x) const;

 private:
  void build();
  void test_jets(Vec2 x, Jet2* out) const;

  QuadRule rule_;
  Box2 box_;
  int s_ = 0;
  int N_ = 10;
  std::optional<RadialBump> cutoff_;
  Eigen::MatrixXd G_;
  Eigen::MatrixXd evec_;
  Eigen::VectorXd eval_;
};

// One-shot dual norm against box tests over an admissible region (tight
// bounding box of the marked cells, tensor Gauss rule on the cells).
double dual_norm(const std::function<double(Vec2)>& f, const AdmissibleSet& A,
                 int s, int N = 10);

// Sobolev norm of order t of boundary data on the unit circle, through the
// circular harmonics g = g0 + sum_n p_n cos(n s) + q_n sin(n s):
//   norm^2 = 2 pi g0^2 + pi sum_n (1 + n^2)^t (p_n^2 + q_n^2),
// truncated at n_max. Densities and traces are resolved by a trapezoid
// scan with `samples` points; atoms contribute analytically. Meaningful
// for comparisons at matching n_max; t = 0 recovers L2 of a density.
double boundary_fourier_norm(const NeumannData& g, double t, int n_max = 256,
                             int samples = 4096);
double boundary_fourier_norm(const std::function<double(double)>& g, double t,
                             int n_max = 256, int samples = 4096);

// Circular harmonics of boundary data on the unit circle,
//   g ~ c0 + sum_{n>=1} p_n cos(n s) + q_n sin(n s),
// with the density resolved by a trapezoid scan of `samples` points (raised
// to 8 n_max if smaller) and atoms contributing analytically.
void circle_harmonics(const NeumannData& g, int n_max, int samples, double& c0,
                      std::vector<double>& p, std::vector<double>& q);

// Sobolev norm of a radial function on the plane from the radial profile of
// its Fourier transform:
//   norm^2 = (1 / 2 pi) int_0^inf (1 + rho^2)^s profile(rho)^2 rho d rho.
// Integrated over doubling octaves until the tail is negligible; returns
// +infinity when the octave contributions stop decaying.
double fourier_norm_plane(const std::function<double(double)>& profile,
                          double s);

// Gram matrices of a discrete space for orders 0, 1, 2: mass, mass plus
// stiffness, and that plus the second-derivative Gram.
struct HsGrams {
  Eigen::SparseMatrix<double> g[3];
  double h = 0;
  int n = 0;
};

HsGrams build_hs_grams(const GfemSpace& space, const AssemblyOptions& opts = {});

// Smallest constant C with |w|_{H^j} <= C h^(i-j) |w|_{H^i} over the space,
// i.e. h^(j-i) sqrt(lambda_max(G_j, G_i)), by generalized power iteration.
// Requires 0 <= i <= j <= 2; returns exactly 1 when i == j.
double inverse_constant(const HsGrams& grams, int i, int j, uint64_t seed = 7);

// Smallest ratio (dual norm of w against the space's own test functions,
// order s) / (L2 norm of w), over random members w, scaled by h^-s. The
// forward inverse estimate bounds this away from zero uniformly in h.
double dual_inverse_constant(const HsGrams& grams, int s, int n_samples = 20,
                             uint64_t seed = 7);

}  // namespace pumice
