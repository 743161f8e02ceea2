// Copyright (c) 2026 the pumice authors
// SPDX-License-Identifier: Apache-2.0

#include "pumice/covering.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <json.hpp>

namespace pumice {

Covering::Covering(std::shared_ptr<Domain> dom, double h, CoveringOptions opts,
                   std::vector<Patch> patches)
    : dom_(std::move(dom)), h_(h), opts_(opts), patches_(std::move(patches)),
      grid_(std::max(h, 1e-12)) {
  for (size_t j = 0; j < patches_.size(); ++j) {
    grid_.insert((int)j, patches_[j].x);
    max_R_ = std::max(max_R_, patches_[j].R);
  }
}

void Covering::overlapping(Vec2 p, std::vector<int>& out) const {
  grid_.gather(p, max_R_, out);
  out.erase(std::remove_if(out.begin(), out.end(),
                           [&](int j) {
                             return distance(p, patches_[j].x) >= patches_[j].R;
                           }),
            out.end());
  std::sort(out.begin(), out.end());
}

void Covering::supports_near(Vec2 p, double r, std::vector<int>& out) const {
  grid_.gather(p, r + max_R_, out);
  out.erase(std::remove_if(out.begin(), out.end(),
                           [&](int j) {
                             return distance(p, patches_[j].x) >=
                                    r + patches_[j].R;
                           }),
            out.end());
  std::sort(out.begin(), out.end());
}

void Covering::neighbors_of(int j, std::vector<int>& out) const {
  supports_near(patches_[j].x, patches_[j].R, out);
  out.erase(std::remove(out.begin(), out.end(), j), out.end());
}

int Covering::max_overlap() const {
  const Box2 bb = dom_->bbox();
  const double pitch = opts_.check_pitch * h_;
  const int nx = (int)std::ceil(bb.extent().x / pitch);
  const int ny = (int)std::ceil(bb.extent().y / pitch);
  int worst = 0;
  std::vector<int> hits;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      const Vec2 p{bb.lo.x + i * pitch, bb.lo.y + j * pitch};
      if (!dom_->inside(p)) continue;
      overlapping(p, hits);
      worst = std::max(worst, (int)hits.size());
    }
  return worst;
}

double Covering::radius_ratio() const {
  double mu = 1.0;
  std::vector<int> nb;
  for (size_t j = 0; j < patches_.size(); ++j) {
    neighbors_of((int)j, nb);
    for (int i : nb)
      mu = std::max(mu, patches_[j].R / patches_[i].R);
  }
  return mu;
}

std::string Covering::to_json() const {
  nlohmann::json j;
  j["h"] = h_;
  j["sigma"] = opts_.sigma;
  j["flat_factor"] = opts_.flat_factor;
  j["seed"] = opts_.seed;
  auto& arr = j["patches"] = nlohmann::json::array();
  for (const Patch& p : patches_)
    arr.push_back({{"x", p.x.x}, {"y", p.x.y}, {"R", p.R},
                   {"rho", p.rho}, {"ring", p.on_ring}});
  return j.dump(2);
}

Covering Covering::from_json(const std::string& text,
                             std::shared_ptr<Domain> dom) {
  const auto j = nlohmann::json::parse(text);
  CoveringOptions opts;
  opts.sigma = j.at("sigma").get<double>();
  opts.flat_factor = j.at("flat_factor").get<double>();
  opts.seed = j.value("seed", (uint64_t)0);
  std::vector<Patch> ps;
  for (const auto& e : j.at("patches"))
    ps.push_back({{e.at("x").get<double>(), e.at("y").get<double>()},
                  e.at("R").get<double>(),
                  e.at("rho").get<double>(),
                  e.at("ring").get<bool>()});
  return Covering(std::move(dom), j.at("h").get<double>(), opts, std::move(ps));
}

namespace {

// Fast conservative signed depth used to filter interior candidates.
// For polar-graph domains the radial gap times the worst normal/ray cosine
// bounds the true distance from below.
struct DepthFilter {
  const Domain* dom;
  double cos_margin = 1.0;

  explicit DepthFilter(const Domain& d) : dom(&d) {
    if (d.kind() == Domain::Kind::Star) {
      double cmin = 1.0;
      for (int i = 0; i < 4096; ++i) {
        const double t = 2 * M_PI * i / 4096;
        const Vec2 q = d.angle_point(t) - d.center();
        const Vec2 v = d.angle_velocity(t);
        cmin = std::min(cmin, std::abs(cross(q, v)) / (q.norm() * v.norm()));
      }
      cos_margin = 0.999 * cmin;
    }
  }

  double lower_bound(Vec2 p) const {
    switch (dom->kind()) {
      case Domain::Kind::Disk:
        return dom->signed_depth(p);
      case Domain::Kind::Star: {
        if (!dom->inside(p)) return -1;
        const double t = dom->angle_of(p);
        const double rp = (p - dom->center()).norm();
        const double rb = (dom->angle_point(t) - dom->center()).norm();
        return (rb - rp) * cos_margin;
      }
      case Domain::Kind::Cusp:
        return dom->signed_depth(p);
    }
    return -1;
  }
};

}  // namespace

Covering build_covering(std::shared_ptr<Domain> dom, double h,
                        const CoveringOptions& opts) {
  if (!(h > 0)) throw InfeasibleParameters("h must be positive");
  // Uniform radii give radius ratio 1, so the profile feasibility bound
  // 1/sigma > max(4 * (ratio + 1), 8) requires sigma < 1/8 strictly.
  if (!(opts.sigma > 0) || !(opts.sigma < 0.125))
    throw InfeasibleParameters("sigma must lie in (0, 1/8)");
  if (!(opts.flat_factor > 0) ||
      opts.flat_factor + 0.02 > opts.ring_depth)
    throw InfeasibleParameters("clearance radius too large for the ring depth");
  if (2 * opts.sigma > opts.ring_depth + 1e-12)
    throw InfeasibleParameters("ring depth too shallow for this sigma");

  const double R = 0.5 * h;
  const double rho = opts.flat_factor * h;
  const double ring_r = opts.ring_depth * h;

  std::vector<Patch> patches;
  PointGrid accept(opts.interior_spacing * h);

  // Stage 1: ring along the inward offset curve (skipped when the domain
  // has no offset parametrization; coverage is then checked all the way to
  // the boundary below and fails if the interior fill cannot reach it).
  if (dom->has_angle_param()) {
    for (Vec2 p : dom->offset_curve_points(ring_r, opts.ring_spacing * h)) {
      accept.insert((int)patches.size(), p);
      patches.push_back({p, R, rho, true});
    }
  }

  // Stage 2: greedy maximin fill from a shuffled candidate grid.
  const DepthFilter depth(*dom);
  const Box2 bb = dom->bbox();
  const double pitch = opts.candidate_pitch * h;
  const int nx = (int)std::ceil(bb.extent().x / pitch);
  const int ny = (int)std::ceil(bb.extent().y / pitch);
  std::vector<Vec2> cand;
  cand.reserve((size_t)(nx + 1) * (ny + 1) / 2);
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      const Vec2 p{bb.lo.x + i * pitch, bb.lo.y + j * pitch};
      if (depth.lower_bound(p) >= ring_r) cand.push_back(p);
    }
  std::mt19937_64 rng(opts.seed);
  std::shuffle(cand.begin(), cand.end(), rng);
  for (Vec2 p : cand) {
    if (accept.any_within(p, opts.interior_spacing * h)) continue;
    accept.insert((int)patches.size(), p);
    patches.push_back({p, R, rho, false});
  }

  if (patches.empty())
    throw CoverageFailure("no patch fits the domain at this h", {},
                          dom->center());

  Covering cov(dom, h, opts, std::move(patches));

  // Coverage check on a fine grid: every interior point must lie strictly
  // inside some support ball.
  const double cp = opts.check_pitch * h;
  const int cnx = (int)std::ceil(bb.extent().x / cp);
  const int cny = (int)std::ceil(bb.extent().y / cp);
  std::vector<Vec2> uncovered;
  Vec2 witness = dom->center();
  double worst_gap = -1;
  std::vector<int> hits;
  auto check_point = [&](Vec2 p) {
    if (!dom->inside(p)) return;
    cov.overlapping(p, hits);
    if (!hits.empty()) return;
    if (uncovered.size() < 10000) uncovered.push_back(p);
    double gap = 1e300;
    for (const Patch& q : cov.patches())
      gap = std::min(gap, distance(p, q.x) - q.R);
    if (gap > worst_gap) {
      worst_gap = gap;
      witness = p;
    }
  };
  for (int j = 0; j <= cny; ++j)
    for (int i = 0; i <= cnx; ++i)
      check_point({bb.lo.x + i * cp, bb.lo.y + j * cp});
  for (Vec2 p : dom->interior_probes(cp)) check_point(p);
  if (!uncovered.empty())
    throw CoverageFailure("covering leaves part of the domain exposed",
                          std::move(uncovered), witness);

  const double mu = cov.radius_ratio();
  if (!(1.0 / opts.sigma > std::max(4 * (mu + 1), 8.0)))
    throw InfeasibleParameters("sigma too large for the measured radius ratio");
  return cov;
}

GridMask::GridMask(Box2 bounds, double pitch)
    : bounds_(bounds), pitch_(pitch),
      nx_(std::max(1, (int)std::ceil(bounds.extent().x / pitch))),
      ny_(std::max(1, (int)std::ceil(bounds.extent().y / pitch))),
      on_((size_t)nx_ * ny_, 0) {}

GridMask GridMask::from_predicate(Box2 bounds, double pitch,
                                  const std::function<bool(Vec2)>& pred) {
  GridMask m(bounds, pitch);
  for (int j = 0; j < m.ny_; ++j)
    for (int i = 0; i < m.nx_; ++i) {
      const Box2 b = m.cell_box(i, j);
      const bool on = pred(b.lo) && pred(b.hi) && pred({b.lo.x, b.hi.y}) &&
                      pred({b.hi.x, b.lo.y}) && pred(b.center());
      m.on_[m.idx(i, j)] = on ? 1 : 0;
    }
  return m;
}

Box2 GridMask::cell_box(int i, int j) const {
  const Vec2 lo{bounds_.lo.x + i * pitch_, bounds_.lo.y + j * pitch_};
  return {lo, lo + Vec2(pitch_, pitch_)};
}

bool GridMask::contains(Vec2 p) const {
  const int i = (int)std::floor((p.x - bounds_.lo.x) / pitch_);
  const int j = (int)std::floor((p.y - bounds_.lo.y) / pitch_);
  if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return false;
  return on_[idx(i, j)] != 0;
}

bool GridMask::contains_disk(Vec2 c, double r) const {
  const int i0 = (int)std::floor((c.x - r - bounds_.lo.x) / pitch_);
  const int i1 = (int)std::floor((c.x + r - bounds_.lo.x) / pitch_);
  const int j0 = (int)std::floor((c.y - r - bounds_.lo.y) / pitch_);
  const int j1 = (int)std::floor((c.y + r - bounds_.lo.y) / pitch_);
  const double r2 = r * r;
  for (int j = j0; j <= j1; ++j)
    for (int i = i0; i <= i1; ++i) {
      const Box2 box = cell_box(i, j);
      const double dx = std::max({box.lo.x - c.x, 0.0, c.x - box.hi.x});
      const double dy = std::max({box.lo.y - c.y, 0.0, c.y - box.hi.y});
      if (dx * dx + dy * dy >= r2) continue;
      if (i < 0 || j < 0 || i >= nx_ || j >= ny_ || !on_[idx(i, j)])
        return false;
    }
  return true;
}

double GridMask::area() const { return (double)cell_count() * pitch_ * pitch_; }

size_t GridMask::cell_count() const {
  size_t n = 0;
  for (uint8_t v : on_) n += v;
  return n;
}

std::vector<Box2> GridMask::cell_boxes() const {
  std::vector<Box2> out;
  out.reserve(cell_count());
  for (int j = 0; j < ny_; ++j)
    for (int i = 0; i < nx_; ++i)
      if (on_[idx(i, j)]) out.push_back(cell_box(i, j));
  return out;
}

GridMask GridMask::eroded(int layers) const {
  GridMask m = *this;
  for (int pass = 0; pass < layers; ++pass) {
    GridMask next = m;
    for (int j = 0; j < ny_; ++j)
      for (int i = 0; i < nx_; ++i) {
        if (!m.on_[idx(i, j)]) continue;
        bool keep = true;
        for (int dj = -1; dj <= 1 && keep; ++dj)
          for (int di = -1; di <= 1 && keep; ++di) {
            const int ii = i + di, jj = j + dj;
            if (ii < 0 || jj < 0 || ii >= nx_ || jj >= ny_ ||
                !m.on_[idx(ii, jj)])
              keep = false;
          }
        if (!keep) next.on_[idx(i, j)] = 0;
      }
    m = next;
  }
  return m;
}

GridMask GridMask::intersect(const GridMask& o) const {
  if (nx_ != o.nx_ || ny_ != o.ny_)
    throw Error("mask grids do not match");
  GridMask m = *this;
  for (size_t k = 0; k < on_.size(); ++k) m.on_[k] = on_[k] & o.on_[k];
  return m;
}

bool GridMask::subset_of(const GridMask& o) const {
  if (nx_ != o.nx_ || ny_ != o.ny_)
    throw Error("mask grids do not match");
  for (size_t k = 0; k < on_.size(); ++k)
    if (on_[k] && !o.on_[k]) return false;
  return true;
}

GridMask interior_mask(const Domain& dom, double clearance, double pitch) {
  const GridMask raw = GridMask::from_predicate(
      dom.bbox(), pitch,
      [&](Vec2 p) { return dom.signed_depth(p) >= clearance; });
  // One extra peel makes the cell test conservative between samples.
  return raw.eroded(1);
}

GridMask disk_mask(Box2 bounds, double pitch, Vec2 c, double r) {
  GridMask m(bounds, pitch);
  for (int j = 0; j < m.ny(); ++j)
    for (int i = 0; i < m.nx(); ++i) {
      const Box2 b = m.cell_box(i, j);
      const double dx = std::max(std::abs(b.lo.x - c.x), std::abs(b.hi.x - c.x));
      const double dy = std::max(std::abs(b.lo.y - c.y), std::abs(b.hi.y - c.y));
      m.set_cell(i, j, dx * dx + dy * dy <= r * r);
    }
  return m;
}

std::vector<GridMask> disk_ladder(const Domain& dom, Vec2 c, double outer_r,
                                  double inner_r, int rungs, double pitch) {
  if (rungs < 1 || inner_r > outer_r)
    throw InfeasibleParameters("ladder needs rungs >= 1 and inner <= outer");
  const GridMask inside = interior_mask(dom, pitch, pitch);
  std::vector<GridMask> out;
  out.reserve(rungs + 1);
  for (int k = 0; k <= rungs; ++k) {
    const double r = outer_r + (inner_r - outer_r) * k / rungs;
    out.push_back(disk_mask(dom.bbox(), pitch, c, r).intersect(inside));
  }
  return out;
}

}  // namespace pumice
