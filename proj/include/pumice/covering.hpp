// Copyright (c) 2026 the pumice authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "pumice/core.hpp"
#include "pumice/geometry.hpp"

namespace pumice {

// One cover patch: an open ball B(x, R). `rho` is the clearance radius the
// center keeps from every domain boundary point and from the centers of the
// other patches' clearance balls; B(x, rho) stays inside the domain.
struct Patch {
  Vec2 x;
  double R = 0;
  double rho = 0;
  bool on_ring = false;
};

struct CoveringOptions {
  double sigma = 0.12;             // flat fraction of the radial profile
  double flat_factor = 0.19;       // rho = flat_factor * h
  double ring_depth = 0.24;        // offset-curve depth / h
  double ring_spacing = 0.48;      // target spacing along the ring / h
  double interior_spacing = 0.42;  // greedy acceptance radius / h
  double candidate_pitch = 1.0 / 16.0;  // interior candidate grid pitch / h
  double check_pitch = 0.1;        // coverage check grid pitch / h
  uint64_t seed = 12345;
};

class Covering {
 public:
  Covering(std::shared_ptr<Domain> dom, double h, CoveringOptions opts,
           std::vector<Patch> patches);

  const Domain& domain() const { return *dom_; }
  std::shared_ptr<Domain> domain_ptr() const { return dom_; }
  double h() const { return h_; }
  double sigma() const { return opts_.sigma; }
  double flat_radius() const { return opts_.flat_factor * h_; }
  const CoveringOptions& options() const { return opts_; }

  const std::vector<Patch>& patches() const { return patches_; }
  size_t size() const { return patches_.size(); }
  const Patch& patch(int j) const { return patches_[j]; }

  // Indices of patches whose support ball contains p.
  void overlapping(Vec2 p, std::vector<int>& out) const;
  // Indices of patches whose support intersects the support of patch j
  // (excluding j itself).
  void neighbors_of(int j, std::vector<int>& out) const;
  // Patches whose support intersects B(p, r).
  void supports_near(Vec2 p, double r, std::vector<int>& out) const;

  // Largest pointwise multiplicity over the check grid.
  int max_overlap() const;
  // Largest R_i / R_j over intersecting pairs (1 for uniform radii).
  double radius_ratio() const;

  std::string to_json() const;
  static Covering from_json(const std::string& text,
                            std::shared_ptr<Domain> dom);

 private:
  std::shared_ptr<Domain> dom_;
  double h_;
  CoveringOptions opts_;
  std::vector<Patch> patches_;
  PointGrid grid_;
  double max_R_ = 0;
};

// Build the two-stage cover: a ring of patches along the inward offset
// curve, then a greedy maximin fill of the interior from a jittered
// candidate grid (deterministic via opts.seed). Throws InfeasibleParameters
// when the parameters cannot satisfy the construction preconditions and
// CoverageFailure (with witnesses) when the produced balls fail to cover
// the domain, as happens for the cusp.
Covering build_covering(std::shared_ptr<Domain> dom, double h,
                        const CoveringOptions& opts = {});

// Occupancy mask over a uniform grid on `bounds`; a point belongs to the
// mask when it lies in a marked cell. Used to represent interior regions
// for error measurement.
class GridMask {
 public:
  GridMask(Box2 bounds, double pitch);

  // Marks the cells whose every corner and center satisfy pred.
  static GridMask from_predicate(Box2 bounds, double pitch,
                                 const std::function<bool(Vec2)>& pred);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double pitch() const { return pitch_; }
  Box2 bounds() const { return bounds_; }

  bool cell(int i, int j) const { return on_[idx(i, j)] != 0; }
  void set_cell(int i, int j, bool v) { on_[idx(i, j)] = v ? 1 : 0; }
  Box2 cell_box(int i, int j) const;

  bool contains(Vec2 p) const;
  // True when every grid cell meeting B(c, r) is marked; false when the
  // ball leaves the grid.
  bool contains_disk(Vec2 c, double r) const;
  double area() const;
  size_t cell_count() const;
  std::vector<Box2> cell_boxes() const;

  // Peel `layers` cells off the mask rim (8-neighborhood).
  GridMask eroded(int layers) const;
  // Cells on in both masks; grids must match.
  GridMask intersect(const GridMask& o) const;
  bool subset_of(const GridMask& o) const;

 private:
  int idx(int i, int j) const { return j * nx_ + i; }
  Box2 bounds_;
  double pitch_;
  int nx_, ny_;
  std::vector<uint8_t> on_;
};

// Cells at distance >= clearance inside the domain (conservative).
GridMask interior_mask(const Domain& dom, double clearance, double pitch);

// Open region on which a selected group of patch functions sums to one, so
// every trial function restricted to it is a plain combination of the group.
// J lists the selected patches; region is the grid representation of the set.
struct AdmissibleSet {
  std::vector<int> J;
  GridMask region;
};

// Cells contained in the disk B(c, r) (exact corner test).
GridMask disk_mask(Box2 bounds, double pitch, Vec2 c, double r);

// Nested masks between the outer and inner clearance levels around a disk:
// rung 0 is B(c, outer_r), rung `rungs` is B(c, inner_r), radii uniformly
// spaced, all intersected with the domain interior at the given clearance.
std::vector<GridMask> disk_ladder(const Domain& dom, Vec2 c, double outer_r,
                                  double inner_r, int rungs, double pitch);

}  // namespace pumice
