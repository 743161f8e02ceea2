// Copyright (c) 2026 the pumice authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pumice/assembly.hpp"
#include "pumice/oracles.hpp"

namespace pumice {

// Least-squares power-law fit of value against h in log-log coordinates.
struct RateFit {
  double slope = 0;
  double intercept = 0;  // log of the leading constant
  double residual = 0;   // rms residual in log space
  int n_used = 0;
};

// Points are (h, value); nonpositive entries are dropped. Throws when fewer
// than three usable points remain.
RateFit fit_rate(const std::vector<std::pair<double, double>>& points);

// Kendall rank correlation of a sequence against its index, with the
// one-sided p-value of the hypothesis "no increasing trend": exact over all
// permutations for n <= 8, normal approximation beyond.
struct TrendTest {
  double tau = 0;
  double p_increasing = 1;
  int n = 0;
};
TrendTest kendall_trend(const std::vector<double>& values);

// Boundary data written as text: a trigonometric polynomial in t such as
// "cos(3t)" or "0.5*sin(2t) - cos(t)", or "dirac(theta0[,w])" for the
// compensated point flux, or "dipole(theta0[,w])" for its derivative.
BoundaryCase parse_data(const std::string& spec, int n_series = 400);

// The admissible hull of the disk B(c, r): the region where the patches
// meeting the disk sum to one.
AdmissibleSet admissible_hull(const PartitionOfUnity& pu, Vec2 c, double r,
                              double pitch = 0);

struct ExperimentConfig {
  // [domain]
  std::string domain = "disk";  // disk | cusp
  double radius = 1.0;

  // [pu]
  CoveringOptions cover;

  // [data]
  std::string data = "cos(t)";
  int n_series = 400;

  // [regions]
  Vec2 region_center{0, 0};
  double region_radius = 0.5;
  int region_depth = 1;  // nesting depth for interior-estimate ladders

  // [study]
  std::vector<double> ladder = {0.2, 0.14, 0.1, 0.07, 0.05};
  int degree = 2;
  std::vector<int> dual_orders = {1};
  AssemblyOptions quad;
  uint64_t seed = 7;
  std::string out_dir;  // empty: nothing written
  // Optional declared targets; NaN leaves a check undeclared.
  double target_interior_rate = nan_marker();
  double target_h1_rate = nan_marker();
  double target_dual_rate = nan_marker();

  static double nan_marker();
  // Ladder strictly decreasing and positive, degree and orders in range.
  void validate() const;
};

// key = value file with sections [domain], [pu], [data], [regions],
// [study]; '#' and ';' start comments. Unknown keys throw.
ExperimentConfig load_config(std::istream& in);
ExperimentConfig load_config_file(const std::string& path);

struct LadderRow {
  double h = 0;
  int dofs = 0;
  bool ok = false;
  std::string error;           // failure annotation when not ok
  std::vector<double> values;  // aligned with StudyReport::columns
};

// Shared report shape for every runner: a ladder table plus fitted rates,
// trend tests, one-off scalars, and free-form notes.
struct StudyReport {
  std::string kind;
  std::vector<std::string> columns;
  std::vector<LadderRow> rows;
  std::map<std::string, RateFit> rates;
  std::map<std::string, TrendTest> trends;
  std::map<std::string, double> scalars;
  std::vector<std::string> notes;
  bool checks_passed = true;

  // Column series over the rows that succeeded, paired with h.
  std::vector<std::pair<double, double>> series(const std::string& col) const;
  std::vector<double> column(const std::string& col) const;

  std::string csv() const;
  std::string json(const ExperimentConfig& cfg) const;
  std::string plot_script(const std::string& csv_name) const;
  // Writes <stem>.csv, <stem>.json, <stem>.gp under cfg.out_dir when set.
  void write(const ExperimentConfig& cfg, const std::string& stem) const;
};

// Covering and partition assumptions per rung plus the scale-invariant
// local-space constants.
StudyReport run_verify(const ExperimentConfig& cfg);

// Solve per rung and record interior H1 error over the admissible hull of
// the configured disk, global errors when the exact solution has finite
// H1 norm, dual-norm errors at the configured orders, and fitted rates.
StudyReport run_convergence(const ExperimentConfig& cfg);

// Ratio of the interior H1 error on A to the sum of the best H1(B)
// approximation (through the patchwise averaged-Taylor interpolant) and the
// dual-norm error on B, for nested admissible A within B.
StudyReport run_interior_estimate_check(const ExperimentConfig& cfg);

// Dual-flavor norm of u_S on the domain, Fourier norm of its boundary trace
// at order 1/2 - k, and the H1 growth exponent across the ladder.
StudyReport run_stability_check(const ExperimentConfig& cfg);

// Negative test: the cusp domain must defeat every covering attempt, with
// the uncovered witness approaching the cusp tip.
StudyReport run_cusp_check(const ExperimentConfig& cfg);

}  // namespace pumice
