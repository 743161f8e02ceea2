// Copyright (c) 2026 the pumice authors
// SPDX-License-Identifier: Apache-2.0

#include "pumice/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

namespace pumice {

double quintic_step(double s) {
  if (s <= 0) return 0;
  if (s >= 1) return 1;
  return s * s * s * (10 + s * (-15 + 6 * s));
}

double quintic_step_d1(double s) {
  if (s <= 0 || s >= 1) return 0;
  const double u = s * (1 - s);
  return 30 * u * u;
}

double quintic_step_d2(double s) {
  if (s <= 0 || s >= 1) return 0;
  return 60 * s * (1 - s) * (1 - 2 * s);
}

namespace {

// Radial profile jets. psi(r/R): plateau [0, 2 sigma R], zero from R.
Jet2 psi_jet(Vec2 x, Vec2 c, double R, double sigma) {
  const Vec2 e = x - c;
  const double r = e.norm();
  const double s = r / R;
  if (s <= 2 * sigma) return Jet2::constant(1.0);
  if (s >= 1) return Jet2::constant(0.0);
  const double iw = 1.0 / (1 - 2 * sigma);
  const double u = (1 - s) * iw;
  const double f = quintic_step(u);
  const double df = -quintic_step_d1(u) * iw / R;
  const double ddf = quintic_step_d2(u) * iw * iw / (R * R);
  return radial_jet(f, df, ddf, e / r, r);
}

// zeta(r/rho): zero on [0, rho], one from 2 rho.
Jet2 zeta_jet(Vec2 x, Vec2 c, double rho) {
  const Vec2 e = x - c;
  const double r = e.norm();
  const double t = r / rho;
  if (t <= 1) return Jet2::constant(0.0);
  if (t >= 2) return Jet2::constant(1.0);
  const double f = quintic_step(t - 1);
  const double df = quintic_step_d1(t - 1) / rho;
  const double ddf = quintic_step_d2(t - 1) / (rho * rho);
  return radial_jet(f, df, ddf, e / r, r);
}

}  // namespace

PartitionOfUnity::Context PartitionOfUnity::context(Vec2 center,
                                                    double radius) const {
  Context ctx;
  cov_->supports_near(center, radius, ctx.A);
  // zeta factor of patch i is below 1 within 2 rho_i of its center.
  std::vector<int> env;
  double rho_max = 0;
  for (const Patch& p : cov_->patches()) rho_max = std::max(rho_max, p.rho);
  cov_->supports_near(center, radius + 2 * rho_max, env);
  for (int i : env)
    if (distance(center, cov_->patch(i).x) <
        radius + 2 * cov_->patch(i).rho)
      ctx.Z.push_back(i);
  return ctx;
}

void PartitionOfUnity::eval_filtered(const std::vector<int>& cand_a,
                                     const std::vector<int>& cand_z, Vec2 x,
                                     Active& out) const {
  out.clear();
  thread_local std::vector<int> zs;
  thread_local std::vector<Jet2> etas;
  zs.clear();
  for (int i : cand_z)
    if ((x - cov_->patch(i).x).squared_norm() <
        4 * cov_->patch(i).rho * cov_->patch(i).rho)
      zs.push_back(i);

  etas.clear();
  Jet2 eta_sum = Jet2::constant(0.0);
  for (int j : cand_a) {
    const Patch& pj = cov_->patch(j);
    if ((x - pj.x).squared_norm() >= pj.R * pj.R) continue;
    Jet2 e = psi_jet(x, pj.x, pj.R, cov_->sigma());
    for (int i : zs) {
      if (i == j) continue;
      if (e.v == 0 && e.gx == 0 && e.gy == 0 && e.hxx == 0 && e.hxy == 0 &&
          e.hyy == 0)
        break;
      e = e * zeta_jet(x, cov_->patch(i).x, cov_->patch(i).rho);
    }
    out.idx.push_back(j);
    etas.push_back(e);
    eta_sum += e;
  }
  if (eta_sum.v <= 0)
    throw NormalizationFailure("partition normalizer vanished at a point");
  out.phi.resize(etas.size());
  for (size_t k = 0; k < etas.size(); ++k) out.phi[k] = etas[k] / eta_sum;
}

void PartitionOfUnity::eval(Vec2 x, Active& out) const {
  thread_local std::vector<int> a, z;
  cov_->supports_near(x, 0, a);
  double rho_max = 0;
  for (int j : a) rho_max = std::max(rho_max, cov_->patch(j).rho);
  cov_->supports_near(x, 2 * rho_max, z);
  eval_filtered(a, z, x, out);
}

void PartitionOfUnity::eval(const Context& ctx, Vec2 x, Active& out) const {
  eval_filtered(ctx.A, ctx.Z, x, out);
}

double PartitionOfUnity::value(int j, Vec2 x) const {
  return jet(j, x).v;
}

Jet2 PartitionOfUnity::jet(int j, Vec2 x) const {
  if ((x - cov_->patch(j).x).squared_norm() >=
      cov_->patch(j).R * cov_->patch(j).R)
    return Jet2::constant(0.0);
  thread_local Active act;
  eval(x, act);
  for (size_t k = 0; k < act.idx.size(); ++k)
    if (act.idx[k] == j) return act.phi[k];
  return Jet2::constant(0.0);
}

PartitionOfUnity::PartitionOfUnity(std::shared_ptr<const Covering> cov)
    : cov_(std::move(cov)) {
  // Normalization floor: the sum of eta over every covered point must stay
  // positive. Sample a global grid plus the midpoints of close center
  // pairs (where clearance balls could illegally overlap).
  const Domain& dom = cov_->domain();
  const double h = cov_->h();
  const Box2 bb = dom.bbox();
  const double cp = cov_->options().check_pitch * h;
  const int nx = (int)std::ceil(bb.extent().x / cp);
  const int ny = (int)std::ceil(bb.extent().y / cp);
  double floor_v = 1e300;
  Active act;
  thread_local std::vector<int> a, z;

  auto eta_at = [&](Vec2 p) {
    cov_->supports_near(p, 0, a);
    double rho_max = 0;
    for (int j : a) rho_max = std::max(rho_max, cov_->patch(j).rho);
    cov_->supports_near(p, 2 * rho_max, z);
    double eta = 0;
    for (int j : a) {
      const Patch& pj = cov_->patch(j);
      const double r = distance(p, pj.x);
      if (r >= pj.R) continue;
      double e = psi_jet(p, pj.x, pj.R, cov_->sigma()).v;
      for (int i : z) {
        if (i == j || e == 0) continue;
        e *= zeta_jet(p, cov_->patch(i).x, cov_->patch(i).rho).v;
      }
      eta += e;
    }
    return eta;
  };

  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      const Vec2 p{bb.lo.x + i * cp, bb.lo.y + j * cp};
      if (!dom.inside(p)) continue;
      floor_v = std::min(floor_v, eta_at(p));
    }
  std::vector<int> nb;
  for (size_t j = 0; j < cov_->size(); ++j) {
    cov_->neighbors_of((int)j, nb);
    for (int i : nb) {
      const Vec2 mid = (cov_->patch((int)j).x + cov_->patch(i).x) * 0.5;
      if (distance(cov_->patch((int)j).x, cov_->patch(i).x) <
              cov_->patch((int)j).rho + cov_->patch(i).rho &&
          dom.inside(mid))
        floor_v = std::min(floor_v, eta_at(mid));
    }
  }
  eta_floor_ = floor_v;
  if (!(eta_floor_ > 1e-12))
    throw NormalizationFailure(
        "partition normalizer falls to zero on the domain");
}

PartitionOfUnity::Report PartitionOfUnity::verify() const {
  Report rep;
  rep.n_patches = (int)cov_->size();
  rep.max_overlap = cov_->max_overlap();
  rep.radius_ratio = cov_->radius_ratio();
  rep.eta_min = eta_floor_;

  const Domain& dom = cov_->domain();
  const double h = cov_->h();
  const Box2 bb = dom.bbox();
  const double cp = cov_->options().check_pitch * h;
  const int nx = (int)std::ceil(bb.extent().x / cp);
  const int ny = (int)std::ceil(bb.extent().y / cp);
  Active act;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      const Vec2 p{bb.lo.x + i * cp, bb.lo.y + j * cp};
      if (!dom.inside(p)) continue;
      eval(p, act);
      Jet2 s = Jet2::constant(0.0);
      for (const Jet2& f : act.phi) s += f;
      rep.partition_defect =
          std::max(rep.partition_defect, std::abs(s.v - 1));
      rep.gradient_defect =
          std::max(rep.gradient_defect, s.grad().norm() * h);
    }

  // Per-patch polar sampling: flat top, support, scaled derivative bounds.
  for (size_t j = 0; j < cov_->size(); ++j) {
    const Patch& pj = cov_->patch((int)j);
    for (int ir = 0; ir <= 24; ++ir)
      for (int it = 0; it < 48; ++it) {
        const double r = pj.R * (ir / 24.0);
        const double th = 2 * M_PI * (it + 0.5 * (ir % 2)) / 48;
        const Vec2 p = pj.x + Vec2(std::cos(th), std::sin(th)) * r;
        if (!dom.inside(p)) continue;
        const Jet2 f = jet((int)j, p);
        if (r < pj.rho * 0.999)
          rep.flat_defect = std::max(rep.flat_defect, std::abs(f.v - 1));
        const double d1 = f.grad().norm();
        const double d2 = std::sqrt(f.hxx * f.hxx + 2 * f.hxy * f.hxy +
                                    f.hyy * f.hyy);
        rep.deriv_bounds[0] = std::max(rep.deriv_bounds[0], std::abs(f.v));
        rep.deriv_bounds[1] = std::max(rep.deriv_bounds[1], d1 * 2 * pj.R);
        rep.deriv_bounds[2] =
            std::max(rep.deriv_bounds[2], d2 * 4 * pj.R * pj.R);
      }
    for (double fac : {1.0001, 1.05, 1.5}) {
      const Vec2 p = pj.x + Vec2(pj.R * fac, 0);
      if (dom.inside(p))
        rep.support_leak = std::max(rep.support_leak,
                                    std::abs(value((int)j, p)));
    }
  }

  if (rep.partition_defect > 1e-10)
    rep.failures.push_back("partition sum is off unity");
  if (rep.gradient_defect > 1e-8)
    rep.failures.push_back("partition gradients do not cancel");
  if (rep.flat_defect > 1e-10)
    rep.failures.push_back("patch functions not flat on clearance balls");
  if (rep.support_leak > 0)
    rep.failures.push_back("patch function leaks outside its support");
  if (!(rep.eta_min > 1e-12))
    rep.failures.push_back("normalizer floor too small");
  return rep;
}

std::string PartitionOfUnity::Report::to_json() const {
  nlohmann::json j;
  j["n_patches"] = n_patches;
  j["max_overlap"] = max_overlap;
  j["radius_ratio"] = radius_ratio;
  j["eta_min"] = eta_min;
  j["partition_defect"] = partition_defect;
  j["gradient_defect"] = gradient_defect;
  j["flat_defect"] = flat_defect;
  j["support_leak"] = support_leak;
  j["deriv_bounds"] = deriv_bounds;
  j["failures"] = failures;
  return j.dump(2);
}

RadialBump::RadialBump(Vec2 center, double r_in, double r_out)
    : c_(center), r_in_(r_in), r_out_(r_out) {
  if (!(0 < r_in && r_in < r_out))
    throw Error("RadialBump: need 0 < r_in < r_out");
}

void RadialBump::derivs(Vec2 x, int order, DerivSet& out) const {
  if (order > 2) throw Error("RadialBump: derivatives beyond order 2");
  out = DerivSet{};
  out.order = order;
  const double dx = x.x - c_.x, dy = x.y - c_.y;
  const double r = std::sqrt(dx * dx + dy * dy);
  const double width = r_out_ - r_in_;
  if (r <= r_in_) {
    out.at(0, 0) = 1;
    return;
  }
  if (r >= r_out_) return;
  const double s = (r_out_ - r) / width;
  out.at(0, 0) = quintic_step(s);
  if (order < 1) return;
  const double fr = -quintic_step_d1(s) / width;
  const double rx = dx / r, ry = dy / r;
  out.at(1, 0) = fr * rx;
  out.at(0, 1) = fr * ry;
  if (order < 2) return;
  const double frr = quintic_step_d2(s) / (width * width);
  const double r3 = r * r * r;
  const double rxx = dy * dy / r3, ryy = dx * dx / r3, rxy = -dx * dy / r3;
  out.at(2, 0) = frr * rx * rx + fr * rxx;
  out.at(1, 1) = frr * rx * ry + fr * rxy;
  out.at(0, 2) = frr * ry * ry + fr * ryy;
}

GaussianBump::GaussianBump(Vec2 center, double width) : c_(center), w_(width) {
  if (!(width > 0)) throw Error("GaussianBump: need width > 0");
}

void GaussianBump::derivs(Vec2 x, int order, DerivSet& out) const {
  out = DerivSet{};
  out.order = order;
  const double tx = (x.x - c_.x) / w_, ty = (x.y - c_.y) / w_;
  const double g = std::exp(-0.5 * (tx * tx + ty * ty));
  // Probabilists' Hermite polynomials: d^n/dt^n e^{-t^2/2} = (-1)^n He_n(t) g.
  std::array<double, 6> hx{}, hy{};
  hx[0] = hy[0] = 1;
  hx[1] = tx;
  hy[1] = ty;
  for (int n = 1; n < 5; ++n) {
    hx[n + 1] = tx * hx[n] - n * hx[n - 1];
    hy[n + 1] = ty * hy[n] - n * hy[n - 1];
  }
  double sp = 1;
  for (int k = 0; k <= order; ++k, sp /= -w_)
    for (int q = 0; q <= k; ++q) out.at(k - q, q) = sp * hx[k - q] * hy[q] * g;
}

AdmissibleSet admissible_from_indices(const PartitionOfUnity& pu,
                                      std::vector<int> J, double pitch) {
  const Covering& cov = pu.covering();
  if (pitch <= 0) pitch = cov.h() / 10;
  std::sort(J.begin(), J.end());
  J.erase(std::unique(J.begin(), J.end()), J.end());
  if (!J.empty() && (J.front() < 0 || J.back() >= (int)cov.size()))
    throw Error("admissible_from_indices: patch index out of range");

  PartitionOfUnity::Active act;
  const auto pred = [&](Vec2 x) {
    if (cov.domain().signed_depth(x) <= 0) return false;
    pu.eval(x, act);
    double s = 0;
    for (size_t k = 0; k < act.idx.size(); ++k)
      if (std::binary_search(J.begin(), J.end(), act.idx[k]))
        s += act.phi[k].v;
    return std::abs(s - 1) <= 1e-10;
  };
  GridMask mask =
      GridMask::from_predicate(cov.domain().bbox(), pitch, pred).eroded(1);
  return {std::move(J), std::move(mask)};
}

std::vector<AdmissibleSet> admissible_ladder(const PartitionOfUnity& pu,
                                             Vec2 center, double radius, int k,
                                             double pitch) {
  const Covering& cov = pu.covering();
  const Domain& dom = cov.domain();
  if (k < 0) throw Error("admissible_ladder: negative depth");

  double theta = std::numeric_limits<double>::infinity();
  const int n_probe = 512;
  for (int i = 0; i < n_probe; ++i) {
    const double t = 2 * M_PI * i / n_probe;
    const Vec2 p = center + Vec2(radius * std::cos(t), radius * std::sin(t));
    theta = std::min(theta, dom.signed_depth(p));
  }
  if (theta <= 0)
    throw InfeasibleParameters("admissible_ladder: seed disk leaves the domain");
  if (4 * (k + 1) * cov.h() > theta)
    throw InfeasibleParameters(
        "admissible_ladder: patch size too large for the boundary gap");
  const double delta = theta / (2 * (k + 1));
  const double grid = pitch > 0 ? pitch : cov.h() / 10;

  std::vector<AdmissibleSet> out;
  out.reserve(k + 2);
  for (int i = 0; i <= k; ++i) {
    // The 4-cell margin keeps the eroded grid region a superset of the
    // generating disk.
    const double reach = radius + i * delta + 4 * grid;
    std::vector<int> J;
    for (int j = 0; j < (int)cov.size(); ++j) {
      const Patch& p = cov.patch(j);
      if ((p.x - center).norm() < reach + p.R) J.push_back(j);
    }
    out.push_back(admissible_from_indices(pu, std::move(J), pitch));
  }
  std::vector<int> all(cov.size());
  for (int j = 0; j < (int)cov.size(); ++j) all[j] = j;
  out.push_back(admissible_from_indices(pu, std::move(all), pitch));
  return out;
}

}  // namespace pumice
