// Copyright (c) 2026 the pumice authors
// SPDX-License-Identifier: Apache-2.0

#include "pumice/assembly.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <thread>
#include <utility>

#include "pumice/kernels.hpp"

namespace pumice {
namespace {

// Zeta ramps over [rho, 2 rho]; refine a margin around that annulus.
constexpr double kRingLo = 0.6;
constexpr double kRingHi = 2.4;

struct PairBlocks {
  Eigen::MatrixXd K, M;
};
// syr_upper fills a[i*lda+j] for i <= j, a row-major upper triangle.
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using BlockMap = std::map<long long, PairBlocks>;

// Volume rule shared by the Gram assemblers: domain cells of size
// leaf_factor * h, refined near the blending rings of every patch.
QuadRule volume_rule(const GfemSpace& space, const AssemblyOptions& opts) {
  const Covering& cov = space.covering();
  const double h = cov.h();
  const int N = space.n_patches();

  PointGrid centers(std::max(h, 1e-12));
  double rho_max = 0;
  for (int j = 0; j < N; ++j) {
    centers.insert(j, cov.patch(j).x);
    rho_max = std::max(rho_max, cov.patch(j).rho);
  }
  SizeField field = [&](Vec2 p) {
    thread_local std::vector<int> hits;
    centers.gather(p, kRingHi * rho_max, hits);
    for (int j : hits) {
      const double d = distance(p, cov.patch(j).x);
      const double rho = cov.patch(j).rho;
      if (d >= kRingLo * rho && d <= kRingHi * rho)
        return opts.ring_refine * rho;
    }
    return 0.0;
  };
  return domain_rule(cov.domain(), opts.leaf_factor * h, opts.gauss_1d, field);
}

}  // namespace

// X^p Y^q jet in a scaled frame, full second order.
Jet2 mono_jet(Vec2 center, double scale, int p, int q, Vec2 x) {
  const double X = (x.x - center.x) / scale;
  const double Y = (x.y - center.y) / scale;
  auto pw = [](double t, int k) {
    double r = 1;
    for (int i = 0; i < k; ++i) r *= t;
    return r;
  };
  const double xp = pw(X, p), yq = pw(Y, q);
  const double xp1 = p > 0 ? pw(X, p - 1) : 0;
  const double yq1 = q > 0 ? pw(Y, q - 1) : 0;
  const double xp2 = p > 1 ? pw(X, p - 2) : 0;
  const double yq2 = q > 1 ? pw(Y, q - 2) : 0;
  Jet2 J;
  J.v = xp * yq;
  J.gx = p * xp1 * yq / scale;
  J.gy = q * xp * yq1 / scale;
  J.hxx = p * (p - 1) * xp2 * yq / (scale * scale);
  J.hxy = p * q * xp1 * yq1 / (scale * scale);
  J.hyy = q * (q - 1) * xp * yq2 / (scale * scale);
  return J;
}

namespace {

void scatter_cell(const std::vector<int>& A, int nb, const RowMat& Kc,
                  const RowMat& Mc, BlockMap& out) {
  const int nA = (int)A.size();
  for (int p = 0; p < nA; ++p)
    for (int q = p; q < nA; ++q) {
      const long long key = (long long)A[p] * (1LL << 32) + A[q];
      auto it = out.find(key);
      if (it == out.end())
        it = out.emplace(key, PairBlocks{Eigen::MatrixXd::Zero(nb, nb),
                                         Eigen::MatrixXd::Zero(nb, nb)})
                 .first;
      auto& blk = it->second;
      if (p == q) {
        for (int a = 0; a < nb; ++a)
          for (int b = a; b < nb; ++b) {
            blk.K(a, b) += Kc(p * nb + a, q * nb + b);
            blk.M(a, b) += Mc(p * nb + a, q * nb + b);
          }
      } else {
        blk.K += Kc.block(p * nb, q * nb, nb, nb);
        blk.M += Mc.block(p * nb, q * nb, nb, nb);
      }
    }
}

}  // namespace

GfemSpace::GfemSpace(std::shared_ptr<const PartitionOfUnity> pu, int degree)
    : pu_(std::move(pu)), degree_(degree), block_(monomial_count(degree)) {
  if (degree < 0 || degree > 5) throw InfeasibleParameters("degree out of range");
}

PolyBasis GfemSpace::basis(int j) const {
  const Patch& p = covering().patch(j);
  return PolyBasis{degree_, p.x, p.R};
}

Eigen::VectorXd GfemSpace::constant_coeffs(double val) const {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(size());
  for (int j = 0; j < n_patches(); ++j) c[dof(j, 0)] = val;
  return c;
}

Eigen::VectorXd GfemSpace::polynomial_coeffs(const Poly2& p) const {
  if (p.degree() > degree_)
    throw InfeasibleParameters("polynomial degree exceeds the space degree");
  Eigen::VectorXd c = Eigen::VectorXd::Zero(size());
  for (int j = 0; j < n_patches(); ++j) {
    const Patch& pj = covering().patch(j);
    const Poly2 local = p.rebased(pj.x, pj.R, degree_);
    for (int a = 0; a < block_; ++a) c[dof(j, a)] = local.coeffs()[a];
  }
  return c;
}

double GfemSpace::value(const Eigen::VectorXd& c, Vec2 x) const {
  thread_local PartitionOfUnity::Active act;
  thread_local std::vector<double> bv;
  pu_->eval(x, act);
  bv.resize(block_);
  double u = 0;
  for (size_t k = 0; k < act.idx.size(); ++k) {
    const int j = act.idx[k];
    basis(j).values(x, bv.data());
    u += act.phi[k].v * kernels::dot(bv.data(), c.data() + dof(j, 0), block_);
  }
  return u;
}

Jet2 GfemSpace::jet(const Eigen::VectorXd& c, Vec2 x) const {
  thread_local PartitionOfUnity::Active act;
  pu_->eval(x, act);
  const auto monos = monomials_up_to(degree_);
  Jet2 J;
  for (size_t k = 0; k < act.idx.size(); ++k) {
    const int j = act.idx[k];
    const Patch& pj = covering().patch(j);
    Jet2 vj;
    for (int a = 0; a < block_; ++a) {
      const double ca = c[dof(j, a)];
      if (ca == 0) continue;
      vj += mono_jet(pj.x, pj.R, monos[a].px, monos[a].py, x) * ca;
    }
    J += act.phi[k] * vj;
  }
  return J;
}

System assemble(const GfemSpace& space, const AssemblyOptions& opts) {
  const int nb = space.block();

  const QuadRule rule = volume_rule(space, opts);
  const size_t nc = rule.n_cells();

  const int threads = std::max(1, std::min<int>(opts.threads, (int)nc));
  std::vector<BlockMap> maps(threads);
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t]() {
      const size_t c0 = nc * t / threads, c1 = nc * (t + 1) / threads;
      BlockMap& out = maps[t];
      PartitionOfUnity::Active act;
      std::vector<double> bv(nb), bgx(nb), bgy(nb);
      std::vector<double> w, wx, wy;
      RowMat Kc, Mc;
      for (size_t cell = c0; cell < c1; ++cell) {
        const size_t i0 = rule.cell_begin(cell), i1 = rule.cell_end(cell);
        if (i0 == i1) continue;
        Vec2 ctr{0, 0};
        for (size_t i = i0; i < i1; ++i) ctr += Vec2{rule.x[i], rule.y[i]};
        ctr = ctr * (1.0 / (double)(i1 - i0));
        double rad = 0;
        for (size_t i = i0; i < i1; ++i)
          rad = std::max(rad, distance(ctr, {rule.x[i], rule.y[i]}));
        const auto ctx = space.pu().context(ctr, rad);
        const int nA = (int)ctx.A.size();
        if (nA == 0) continue;
        const int nd = nA * nb;
        Kc = RowMat::Zero(nd, nd);
        Mc = RowMat::Zero(nd, nd);
        w.assign(nd, 0.0);
        wx.assign(nd, 0.0);
        wy.assign(nd, 0.0);
        for (size_t i = i0; i < i1; ++i) {
          const Vec2 x{rule.x[i], rule.y[i]};
          space.pu().eval(ctx, x, act);
          std::fill(w.begin(), w.end(), 0.0);
          std::fill(wx.begin(), wx.end(), 0.0);
          std::fill(wy.begin(), wy.end(), 0.0);
          size_t pos = 0;
          for (size_t k = 0; k < act.idx.size(); ++k) {
            const int j = act.idx[k];
            while (pos < (size_t)nA && ctx.A[pos] < j) ++pos;
            if (pos >= (size_t)nA || ctx.A[pos] != j)
              throw Error("active patch missing from the cell context");
            const int off = (int)pos * nb;
            const Jet2& f = act.phi[k];
            space.basis(j).values_grads(x, bv.data(), bgx.data(), bgy.data());
            for (int a = 0; a < nb; ++a) {
              w[off + a] = f.v * bv[a];
              wx[off + a] = f.gx * bv[a] + f.v * bgx[a];
              wy[off + a] = f.gy * bv[a] + f.v * bgy[a];
            }
          }
          const double wi = rule.w[i];
          kernels::syr_upper(Kc.data(), nd, wx.data(), wi, nd);
          kernels::syr_upper(Kc.data(), nd, wy.data(), wi, nd);
          kernels::syr_upper(Mc.data(), nd, w.data(), wi, nd);
        }
        scatter_cell(ctx.A, nb, Kc, Mc, out);
      }
    });
  }
  for (auto& th : pool) th.join();

  BlockMap merged;
  for (int t = 0; t < threads; ++t) {
    for (auto& [key, blk] : maps[t]) {
      auto it = merged.find(key);
      if (it == merged.end())
        merged.emplace(key, std::move(blk));
      else {
        it->second.K += blk.K;
        it->second.M += blk.M;
      }
    }
    maps[t].clear();
  }

  const int n = space.size();
  std::vector<Eigen::Triplet<double>> tk, tm;
  tk.reserve(merged.size() * nb * nb * 2);
  tm.reserve(merged.size() * nb * nb * 2);
  for (const auto& [key, blk] : merged) {
    const int jp = (int)(key >> 32), jq = (int)(key & 0xffffffffLL);
    const int rp = jp * nb, rq = jq * nb;
    for (int a = 0; a < nb; ++a)
      for (int b = 0; b < nb; ++b) {
        if (jp == jq && b < a) continue;
        tk.emplace_back(rp + a, rq + b, blk.K(a, b));
        tm.emplace_back(rp + a, rq + b, blk.M(a, b));
        if (rp + a != rq + b) {
          tk.emplace_back(rq + b, rp + a, blk.K(a, b));
          tm.emplace_back(rq + b, rp + a, blk.M(a, b));
        }
      }
  }

  System sys;
  sys.K.resize(n, n);
  sys.M.resize(n, n);
  sys.K.setFromTriplets(tk.begin(), tk.end());
  sys.M.setFromTriplets(tm.begin(), tm.end());
  sys.q = sys.M * space.constant_coeffs(1.0);
  sys.area = rule.total_weight();
  return sys;
}

Eigen::SparseMatrix<double> assemble_hess_gram(const GfemSpace& space,
                                               const AssemblyOptions& opts) {
  const int nb = space.block();
  const auto monos = monomials_up_to(space.degree());

  const QuadRule rule = volume_rule(space, opts);
  const size_t nc = rule.n_cells();

  using HMap = std::map<long long, Eigen::MatrixXd>;
  const int threads = std::max(1, std::min<int>(opts.threads, (int)nc));
  std::vector<HMap> maps(threads);
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t]() {
      const size_t c0 = nc * t / threads, c1 = nc * (t + 1) / threads;
      HMap& out = maps[t];
      PartitionOfUnity::Active act;
      std::vector<double> hxx, hxy, hyy;
      RowMat Hc;
      for (size_t cell = c0; cell < c1; ++cell) {
        const size_t i0 = rule.cell_begin(cell), i1 = rule.cell_end(cell);
        if (i0 == i1) continue;
        Vec2 ctr{0, 0};
        for (size_t i = i0; i < i1; ++i) ctr += Vec2{rule.x[i], rule.y[i]};
        ctr = ctr * (1.0 / (double)(i1 - i0));
        double rad = 0;
        for (size_t i = i0; i < i1; ++i)
          rad = std::max(rad, distance(ctr, {rule.x[i], rule.y[i]}));
        const auto ctx = space.pu().context(ctr, rad);
        const int nA = (int)ctx.A.size();
        if (nA == 0) continue;
        const int nd = nA * nb;
        Hc = RowMat::Zero(nd, nd);
        hxx.assign(nd, 0.0);
        hxy.assign(nd, 0.0);
        hyy.assign(nd, 0.0);
        for (size_t i = i0; i < i1; ++i) {
          const Vec2 x{rule.x[i], rule.y[i]};
          space.pu().eval(ctx, x, act);
          std::fill(hxx.begin(), hxx.end(), 0.0);
          std::fill(hxy.begin(), hxy.end(), 0.0);
          std::fill(hyy.begin(), hyy.end(), 0.0);
          size_t pos = 0;
          for (size_t k = 0; k < act.idx.size(); ++k) {
            const int j = act.idx[k];
            while (pos < (size_t)nA && ctx.A[pos] < j) ++pos;
            if (pos >= (size_t)nA || ctx.A[pos] != j)
              throw Error("active patch missing from the cell context");
            const int off = (int)pos * nb;
            const Patch& pj = space.covering().patch(j);
            for (int a = 0; a < nb; ++a) {
              const Jet2 J =
                  act.phi[k] *
                  mono_jet(pj.x, pj.R, monos[a].px, monos[a].py, x);
              hxx[off + a] = J.hxx;
              hxy[off + a] = J.hxy;
              hyy[off + a] = J.hyy;
            }
          }
          const double wi = rule.w[i];
          kernels::syr_upper(Hc.data(), nd, hxx.data(), wi, nd);
          kernels::syr_upper(Hc.data(), nd, hxy.data(), wi, nd);
          kernels::syr_upper(Hc.data(), nd, hyy.data(), wi, nd);
        }
        const int mA = nA;
        for (int p = 0; p < mA; ++p)
          for (int q = p; q < mA; ++q) {
            const long long key = (long long)ctx.A[p] * (1LL << 32) + ctx.A[q];
            auto it = out.find(key);
            if (it == out.end())
              it = out.emplace(key, Eigen::MatrixXd::Zero(nb, nb)).first;
            if (p == q) {
              for (int a = 0; a < nb; ++a)
                for (int b = a; b < nb; ++b)
                  it->second(a, b) += Hc(p * nb + a, q * nb + b);
            } else {
              it->second += Hc.block(p * nb, q * nb, nb, nb);
            }
          }
      }
    });
  }
  for (auto& th : pool) th.join();

  HMap merged;
  for (int t = 0; t < threads; ++t) {
    for (auto& [key, blk] : maps[t]) {
      auto it = merged.find(key);
      if (it == merged.end())
        merged.emplace(key, std::move(blk));
      else
        it->second += blk;
    }
    maps[t].clear();
  }

  const int n = space.size();
  std::vector<Eigen::Triplet<double>> th;
  th.reserve(merged.size() * nb * nb * 2);
  for (const auto& [key, blk] : merged) {
    const int jp = (int)(key >> 32), jq = (int)(key & 0xffffffffLL);
    const int rp = jp * nb, rq = jq * nb;
    for (int a = 0; a < nb; ++a)
      for (int b = 0; b < nb; ++b) {
        if (jp == jq && b < a) continue;
        th.emplace_back(rp + a, rq + b, blk(a, b));
        if (rp + a != rq + b) th.emplace_back(rq + b, rp + a, blk(a, b));
      }
  }
  Eigen::SparseMatrix<double> H(n, n);
  H.setFromTriplets(th.begin(), th.end());
  return H;
}

namespace {

// Accumulate <atom, Phi_i> for every trial function active at the atom.
void add_atom(const GfemSpace& space, const BoundaryAtom& atom,
              Eigen::VectorXd& b) {
  const Domain& dom = space.covering().domain();
  const Vec2 x = dom.boundary_point(atom.s);
  const Vec2 T = dom.boundary_tangent(atom.s);
  const Vec2 nu = dom.outward_normal(atom.s);
  const double kappa = dom.curvature(atom.s);
  PartitionOfUnity::Active act;
  space.pu().eval(x, act);
  const auto monos = monomials_up_to(space.degree());
  for (size_t k = 0; k < act.idx.size(); ++k) {
    const int j = act.idx[k];
    const Patch& pj = space.covering().patch(j);
    for (int a = 0; a < space.block(); ++a) {
      const Jet2 J =
          act.phi[k] *
          mono_jet(pj.x, pj.R, monos[a].px, monos[a].py, x);
      double val = 0;
      switch (atom.order) {
        case 0:
          val = J.v;
          break;
        case 1:
          val = -(T.x * J.gx + T.y * J.gy);
          break;
        case 2: {
          const double tht = T.x * T.x * J.hxx + 2 * T.x * T.y * J.hxy +
                             T.y * T.y * J.hyy;
          val = tht - kappa * (nu.x * J.gx + nu.y * J.gy);
          break;
        }
        default:
          throw InfeasibleParameters("atom order must be 0, 1, or 2");
      }
      b[space.dof(j, a)] += atom.weight * val;
    }
  }
}

}  // namespace

namespace {

// Panel count that resolves the quintic transition band (width rho) of the
// trial traces along the boundary.
int auto_panels(const GfemSpace& space, int panels) {
  if (panels > 0) return panels;
  const Covering& cov = space.covering();
  const double L = cov.domain().arc_length();
  const double feat = 0.5 * cov.flat_radius();
  return std::max(64, (int)std::ceil(L / feat));
}

}  // namespace

double data_mean(const GfemSpace& space, const NeumannData& g, int panels,
                 int n1d) {
  const Domain& dom = space.covering().domain();
  panels = auto_panels(space, panels);
  double total = 0;
  if (g.density) {
    const BoundaryRule br = boundary_rule(dom, panels, n1d);
    for (size_t k = 0; k < br.size(); ++k) total += br.w[k] * g.density(br.s[k]);
  }
  for (const auto& atom : g.atoms)
    if (atom.order == 0) total += atom.weight;
  return total;
}

Eigen::VectorXd assemble_rhs(const GfemSpace& space, const NeumannData& g,
                             int panels, int n1d) {
  const Domain& dom = space.covering().domain();
  panels = auto_panels(space, panels);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(space.size());

  double mass_scale = 0;
  if (g.density) {
    const BoundaryRule br = boundary_rule(dom, panels, n1d);
    PartitionOfUnity::Active act;
    std::vector<double> bv(space.block());
    for (size_t k = 0; k < br.size(); ++k) {
      const double gs = g.density(br.s[k]);
      mass_scale += br.w[k] * std::abs(gs);
      if (gs == 0) continue;
      const Vec2 x = dom.boundary_point(br.s[k]);
      space.pu().eval(x, act);
      for (size_t i = 0; i < act.idx.size(); ++i) {
        const int j = act.idx[i];
        space.basis(j).values(x, bv.data());
        const double f = br.w[k] * gs * act.phi[i].v;
        kernels::axpy(b.data() + space.dof(j, 0), bv.data(), f, space.block());
      }
    }
  }
  for (const auto& atom : g.atoms) {
    mass_scale += std::abs(atom.weight);
    add_atom(space, atom, b);
  }

  const double defect = data_mean(space, g, panels, n1d);
  if (std::abs(defect) > g.compat_tol * std::max(1.0, mass_scale))
    throw CompatibilityError("boundary data pairs with constants: <g,1> = " +
                             std::to_string(defect));
  return b;
}

namespace {

// Relative Galerkin residual of a saddle candidate.
double saddle_residual(const System& sys, const Eigen::VectorXd& b,
                       const Eigen::VectorXd& c, double lambda) {
  const Eigen::VectorXd r = sys.K * c + sys.q * lambda - b;
  return r.lpNorm<Eigen::Infinity>() /
         std::max(1.0, b.lpNorm<Eigen::Infinity>());
}

bool saddle_acceptable(const System& sys, const Eigen::VectorXd& b,
                       const Eigen::VectorXd& c, double lambda) {
  if (!c.allFinite() || !std::isfinite(lambda)) return false;
  if (saddle_residual(sys, b, c, lambda) > 1e-8) return false;
  const double mean_tol = 1e-9 * std::max(1.0, c.lpNorm<Eigen::Infinity>());
  return std::abs(sys.q.dot(c)) <= mean_tol;
}

}  // namespace

GfemFunction solve_neumann(std::shared_ptr<const GfemSpace> space,
                           const System& sys, const Eigen::VectorXd& b,
                           SolveInfo* info) {
  const int n = (int)sys.K.rows();
  const double defect = space->constant_coeffs(1).dot(b);
  if (std::abs(defect) > 1e-10 * std::max(1.0, b.lpNorm<Eigen::Infinity>()))
    throw CompatibilityError("load pairs with the constant function: " +
                             std::to_string(defect));

  Eigen::VectorXd d(n + 1);
  for (int i = 0; i < n; ++i) {
    const double kii = sys.K.coeff(i, i);
    d[i] = kii > 0 ? 1.0 / std::sqrt(kii) : 1.0;
  }
  d[n] = 1;

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve((size_t)sys.K.nonZeros() + 2 * n);
  for (int k = 0; k < sys.K.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.K, k); it; ++it)
      trips.emplace_back((int)it.row(), (int)it.col(),
                         d[it.row()] * it.value() * d[it.col()]);
  for (int i = 0; i < n; ++i) {
    if (sys.q[i] != 0) {
      trips.emplace_back(i, n, d[i] * sys.q[i]);
      trips.emplace_back(n, i, d[i] * sys.q[i]);
    }
  }
  Eigen::SparseMatrix<double> A(n + 1, n + 1);
  A.setFromTriplets(trips.begin(), trips.end());
  Eigen::VectorXd rhs(n + 1);
  rhs.head(n) = d.head(n).cwiseProduct(b);
  rhs[n] = 0;

  Eigen::VectorXd sol;
  int path = -1;
  const auto try_direct = [&](const auto& solver) {
    if (solver.info() != Eigen::Success) return false;
    Eigen::VectorXd x = solver.solve(rhs);
    if (solver.info() != Eigen::Success) return false;
    x += solver.solve((rhs - A * x).eval());
    x = d.cwiseProduct(x);
    if (!saddle_acceptable(sys, b, x.head(n), x[n])) return false;
    sol = std::move(x);
    return true;
  };
  {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
    if (try_direct(ldlt)) path = 0;
  }
  if (path < 0) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
    if (try_direct(lu)) path = 1;
  }
  if (path < 0) {
    if (n + 1 > 6000)
      throw SingularSystem("factorizations failed and the system is too "
                           "large for the dense least-norm fallback");
    const Eigen::MatrixXd Ad(A);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Ad);
    if (eig.info() != Eigen::Success)
      throw SingularSystem("eigendecomposition failed");
    const Eigen::VectorXd& ev = eig.eigenvalues();
    const double cut = 1e-12 * ev.cwiseAbs().maxCoeff();
    const Eigen::VectorXd proj = eig.eigenvectors().transpose() * rhs;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n + 1);
    for (int i = 0; i < n + 1; ++i)
      if (std::abs(ev[i]) > cut)
        x += (proj[i] / ev[i]) * eig.eigenvectors().col(i);
    x = d.cwiseProduct(x);
    if (!saddle_acceptable(sys, b, x.head(n), x[n]))
      throw SingularSystem("least-norm fallback left a large residual");
    sol = std::move(x);
    path = 2;
  }

  GfemFunction u{space, sol.head(n)};
  if (info) {
    info->lambda = sol[n];
    info->constraint = sys.q.dot(u.c);
    info->residual = saddle_residual(sys, b, u.c, sol[n]);
    info->path = path;
  }
  return u;
}

GfemFunction quasi_interpolant(std::shared_ptr<const GfemSpace> space,
                               const SmoothFn& u) {
  const int nb = space->block();
  Eigen::VectorXd c(space->size());
  for (int j = 0; j < space->n_patches(); ++j) {
    const Patch& p = space->covering().patch(j);
    const Poly2 v = averaged_taylor(u, space->degree(), p.x, p.rho, p.x, p.R);
    for (int a = 0; a < nb; ++a) c[space->dof(j, a)] = v.coeffs()[a];
  }
  return GfemFunction{space, std::move(c)};
}

std::vector<int> interior_patches(const GfemSpace& space, double clearance) {
  const Domain& dom = space.covering().domain();
  std::vector<int> out;
  for (int j = 0; j < space.n_patches(); ++j) {
    const Patch& p = space.covering().patch(j);
    if (dom.signed_depth(p.x) - p.R >= clearance) out.push_back(j);
  }
  return out;
}

std::vector<int> restrict_to_compact(const GfemSpace& space,
                                     const AdmissibleSet& A) {
  std::vector<int> dofs;
  for (int j = 0; j < space.n_patches(); ++j) {
    const Patch& p = space.covering().patch(j);
    if (!A.region.contains_disk(p.x, p.R)) continue;
    for (int a = 0; a < space.block(); ++a) dofs.push_back(space.dof(j, a));
  }
  return dofs;
}

GfemFunction discrete_harmonic(std::shared_ptr<const GfemSpace> space,
                               const System& sys, const AdmissibleSet& A1,
                               const Eigen::VectorXd& seed, double* residual) {
  const std::vector<int> I = restrict_to_compact(*space, A1);
  const int n = space->size(), ni = (int)I.size();
  Eigen::VectorXd w = seed;

  if (ni > 0) {
    std::vector<int> pos(n, -1);
    for (int k = 0; k < ni; ++k) pos[I[k]] = k;

    std::vector<Eigen::Triplet<double>> trips;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ni);
    for (int col = 0; col < sys.K.outerSize(); ++col)
      for (Eigen::SparseMatrix<double>::InnerIterator it(sys.K, col); it;
           ++it) {
        const int pr = pos[it.row()], pc = pos[it.col()];
        if (pr >= 0 && pc >= 0)
          trips.emplace_back(pr, pc, it.value());
        else if (pr >= 0)
          rhs[pr] -= it.value() * seed[it.col()];
      }
    Eigen::SparseMatrix<double> Kii(ni, ni);
    Kii.setFromTriplets(trips.begin(), trips.end());

    Eigen::VectorXd wi;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(Kii);
    if (ldlt.info() == Eigen::Success) {
      wi = ldlt.solve(rhs);
      wi += ldlt.solve((rhs - Kii * wi).eval());
    }
    if (ldlt.info() != Eigen::Success || !wi.allFinite()) {
      Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                               Eigen::Lower | Eigen::Upper>
          cg(Kii);
      cg.setMaxIterations(40 * ni);
      cg.setTolerance(1e-13);
      Eigen::VectorXd guess(ni);
      for (int k = 0; k < ni; ++k) guess[k] = seed[I[k]];
      wi = cg.solveWithGuess(rhs, guess);
      if (!wi.allFinite())
        throw SingularSystem("constrained block solve failed");
    }
    for (int k = 0; k < ni; ++k) w[I[k]] = wi[k];
  }

  double kmax = 0;
  for (int col = 0; col < sys.K.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.K, col); it; ++it)
      kmax = std::max(kmax, std::abs(it.value()));
  const Eigen::VectorXd r = sys.K * w;
  double num = 0;
  for (int i : I) num = std::max(num, std::abs(r[i]));
  const double rel =
      num / std::max(1.0, kmax * w.lpNorm<Eigen::Infinity>());
  if (rel > 1e-8)
    throw SingularSystem("constrained pairings left a residual of " +
                         std::to_string(rel));
  if (residual) *residual = rel;
  return GfemFunction{space, std::move(w)};
}

GfemFunction superapprox_transfer(const SmoothFn& rho, const GfemFunction& w) {
  const std::shared_ptr<const GfemSpace>& space = w.space;
  const int nb = space->block();
  Eigen::VectorXd out(space->size());
  for (int j = 0; j < space->n_patches(); ++j) {
    const Patch& p = space->covering().patch(j);
    const Poly2 wj = space->basis(j).combination(w.c.data() + (size_t)j * nb);
    const auto f = [&](Vec2 x) {
      DerivSet ds;
      rho.derivs(x, 2, ds);
      const Jet2 rj{ds.at(0, 0), ds.at(1, 0), ds.at(0, 1),
                    ds.at(2, 0), ds.at(1, 1), ds.at(0, 2)};
      return rj * wj.jet(x);
    };
    const Poly2 proj =
        h1_ball_projection(f, space->degree(), p.x, p.R, p.x, p.R);
    for (int a = 0; a < nb; ++a) out[space->dof(j, a)] = proj.coeffs()[a];
  }
  return GfemFunction{space, std::move(out)};
}

void dump_sparse(const Eigen::SparseMatrix<double>& A,
                 const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path);
  os << std::setprecision(17) << "sparse " << A.rows() << ' ' << A.cols()
     << ' ' << A.nonZeros() << '\n';
  for (int k = 0; k < A.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it)
      os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

void dump_vector(const Eigen::VectorXd& v, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path);
  os << std::setprecision(17) << "vector " << v.size() << '\n';
  for (int i = 0; i < (int)v.size(); ++i) os << i << ' ' << v[i] << '\n';
}

void dump_samples(const GfemFunction& u, int n_side, const std::string& path) {
  const Domain& dom = u.space->covering().domain();
  const Box2 bb = dom.bbox();
  std::vector<std::array<double, 3>> rows;
  for (int iy = 0; iy < n_side; ++iy)
    for (int ix = 0; ix < n_side; ++ix) {
      const Vec2 x{bb.lo.x + (ix + 0.5) / n_side * (bb.hi.x - bb.lo.x),
                   bb.lo.y + (iy + 0.5) / n_side * (bb.hi.y - bb.lo.y)};
      if (dom.signed_depth(x) <= 0) continue;
      rows.push_back({x.x, x.y, u.value(x)});
    }
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path);
  os << std::setprecision(17) << "samples " << rows.size() << '\n';
  for (const auto& r : rows) os << r[0] << ' ' << r[1] << ' ' << r[2] << '\n';
}

}  // namespace pumice
