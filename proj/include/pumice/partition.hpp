// Copyright (c) 2026 the pumice authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "pumice/covering.hpp"
#include "pumice/core.hpp"

namespace pumice {

// C^2 radial profiles built from the quintic step q(s) = s^3 (10 - 15 s + 6 s^2).
// psi is 1 on [0, 2 sigma], 0 from 1 on; zeta is 0 on [0, 1], 1 from 2 on.
double quintic_step(double s);
double quintic_step_d1(double s);
double quintic_step_d2(double s);

// C^2 radial cutoff: 1 on B(center, r_in), 0 outside B(center, r_out),
// quintic in between. Derivatives are available up to order 2.
class RadialBump : public SmoothFn {
 public:
  RadialBump(Vec2 center, double r_in, double r_out);
  void derivs(Vec2 x, int order, DerivSet& out) const override;

 private:
  Vec2 c_;
  double r_in_, r_out_;
};

// Analytic bump exp(-|x - center|^2 / (2 width^2)) with derivatives of every
// supported order.
class GaussianBump : public SmoothFn {
 public:
  GaussianBump(Vec2 center, double width);
  void derivs(Vec2 x, int order, DerivSet& out) const override;

 private:
  Vec2 c_;
  double w_;
};

// Shepard-normalized partition of unity over a covering. Patch j carries
//   eta_j(x) = psi(|x - x_j| / R_j) * prod_{i != j} zeta(|x - x_i| / rho_i),
//   phi_j = eta_j / sum_i eta_i.
// The zeta factors cut every other patch function out of the clearance ball
// B(x_j, rho_j), so phi_j is exactly 1 there: each patch function is flat on
// a ball whose radius is comparable to the patch diameter. Construction
// verifies that the normalizing sum stays positive over the domain and
// throws NormalizationFailure otherwise.
class PartitionOfUnity {
 public:
  explicit PartitionOfUnity(std::shared_ptr<const Covering> cov);

  const Covering& covering() const { return *cov_; }
  size_t size() const { return cov_->size(); }
  double sigma() const { return cov_->sigma(); }

  // Values and first derivatives of all patch functions active at x.
  struct Active {
    std::vector<int> idx;
    std::vector<Jet2> phi;
    void clear() { idx.clear(); phi.clear(); }
  };

  // Candidate lists reused across evaluation points that stay inside a known
  // ball (cell): A holds patches whose support can reach the ball, Z those
  // whose zeta factor can be below 1 on it.
  struct Context {
    std::vector<int> A, Z;
  };
  Context context(Vec2 center, double radius) const;

  void eval(Vec2 x, Active& out) const;
  void eval(const Context& ctx, Vec2 x, Active& out) const;

  double value(int j, Vec2 x) const;
  Jet2 jet(int j, Vec2 x) const;

  // Minimum of the normalizing sum seen during construction.
  double eta_floor() const { return eta_floor_; }

  struct Report {
    int n_patches = 0;
    int max_overlap = 0;        // largest pointwise multiplicity
    double radius_ratio = 1;    // largest R_i / R_j over intersecting pairs
    double eta_min = 0;         // normalization floor over the sample grid
    double partition_defect = 0;   // max |sum_j phi_j - 1|
    double gradient_defect = 0;    // max |sum_j grad phi_j| * h
    double flat_defect = 0;        // max |phi_j - 1| over the clearance balls
    double support_leak = 0;       // max |phi_j| outside the support ball
    // max_j max_x |D^l phi_j| * (2 R_j)^l for l = 0, 1, 2
    std::array<double, 3> deriv_bounds{};
    std::vector<std::string> failures;
    bool ok() const { return failures.empty(); }
    std::string to_json() const;
  };

  // Measures the partition, flat-top, support, and derivative-bound
  // properties by dense sampling (a global grid plus per-patch polar grids).
  Report verify() const;

 private:
  void eval_filtered(const std::vector<int>& cand_a,
                     const std::vector<int>& cand_z, Vec2 x,
                     Active& out) const;

  std::shared_ptr<const Covering> cov_;
  double eta_floor_ = 0;
};

// Region where the patch functions indexed by J sum to one (within 1e-10 on
// a grid of the given pitch, shrunk by one cell so the set is interior).
// pitch <= 0 picks h / 10. An empty region is allowed.
AdmissibleSet admissible_from_indices(const PartitionOfUnity& pu,
                                      std::vector<int> J, double pitch = 0);

// Nested admissible sets B_0 c B_1 c ... c B_k c Omega grown from the disk
// B(center, radius): B_i collects the patches whose support meets the disk
// inflated by i * delta, with delta = theta / (2 (k + 1)) and theta the gap
// between the seed disk and the domain boundary. The last entry covers the
// whole domain. Throws InfeasibleParameters when 4 (k + 1) h > theta.
std::vector<AdmissibleSet> admissible_ladder(const PartitionOfUnity& pu,
                                             Vec2 center, double radius, int k,
                                             double pitch = 0);

}  // namespace pumice
