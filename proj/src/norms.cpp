// Copyright (c) 2026 the pumice authors
// SPDX-License-Identifier: Apache-2.0

#include "pumice/norms.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <thread>
#include <utility>

#include "pumice/kernels.hpp"

namespace pumice {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                             Eigen::RowMajor>;

// Partial sums of NA accumulators over the rule, split into fixed point
// ranges and merged in range order so results do not depend on scheduling.
template <int NA, class F>
std::array<double, NA> rule_sums(const QuadRule& rule, const F& per_point) {
  const size_t np = rule.size();
  const int threads = np >= 2048 ? 4 : 1;
  std::array<std::array<double, NA>, 4> parts{};
  if (threads == 1) {
    for (size_t i = 0; i < np; ++i) per_point(i, parts[0].data());
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t]() {
        const size_t i0 = np * t / threads, i1 = np * (t + 1) / threads;
        for (size_t i = i0; i < i1; ++i) per_point(i, parts[t].data());
      });
    }
    for (auto& th : pool) th.join();
  }
  std::array<double, NA> out{};
  for (int t = 0; t < 4; ++t)
    for (int a = 0; a < NA; ++a) out[a] += parts[t][a];
  return out;
}

double jet_sq(const Jet2& j, int s) {
  double sum = j.v * j.v;
  if (s >= 1) sum += j.gx * j.gx + j.gy * j.gy;
  if (s >= 2) sum += j.hxx * j.hxx + j.hxy * j.hxy + j.hyy * j.hyy;
  return sum;
}

template <class J>
double hs_jet_norm(const J& jet_at, const QuadRule& rule, int s) {
  if (s < 0 || s > 2)
    throw Error("jet-based Sobolev order must be between 0 and 2");
  const auto acc = rule_sums<1>(rule, [&](size_t i, double* a) {
    a[0] += rule.w[i] * jet_sq(jet_at(rule.point(i)), s);
  });
  return std::sqrt(acc[0]);
}

template <class R>
ErrorNorms error_impl(const GfemFunction& u, const R& ref,
                      const QuadRule& rule) {
  const auto acc = rule_sums<2>(rule, [&](size_t i, double* a) {
    const Vec2 x = rule.point(i);
    const Jet2 ju = u.jet(x);
    const Jet2 jr = ref.jet(x);
    const double dv = ju.v - jr.v;
    const double dgx = ju.gx - jr.gx, dgy = ju.gy - jr.gy;
    a[0] += rule.w[i] * dv * dv;
    a[1] += rule.w[i] * (dgx * dgx + dgy * dgy);
  });
  return {std::sqrt(acc[0]), std::sqrt(acc[1])};
}

struct Leg {
  double v = 0, d1 = 0, d2 = 0;
};

// Legendre values and first two derivatives at t, orders 0..N.
void legendre_line(double t, int N, Leg* out) {
  out[0] = {1.0, 0.0, 0.0};
  if (N == 0) return;
  out[1] = {t, 1.0, 0.0};
  for (int k = 1; k < N; ++k) {
    const double a = 2 * k + 1, b = k, c = 1.0 / (k + 1);
    out[k + 1].v = (a * t * out[k].v - b * out[k - 1].v) * c;
    out[k + 1].d1 =
        (a * (out[k].v + t * out[k].d1) - b * out[k - 1].d1) * c;
    out[k + 1].d2 =
        (a * (2 * out[k].d1 + t * out[k].d2) - b * out[k - 1].d2) * c;
  }
}

}  // namespace

double hs_norm(const SmoothFn& f, const QuadRule& rule, int s) {
  if (s < 0 || s > 3) throw Error("Sobolev order must be between 0 and 3");
  const auto acc = rule_sums<1>(rule, [&](size_t i, double* a) {
    DerivSet d;
    f.derivs(rule.point(i), s, d);
    double sum = 0;
    for (int k = 0; k <= s; ++k)
      for (int q = 0; q <= k; ++q) {
        const double v = d.at(k - q, q);
        sum += v * v;
      }
    a[0] += rule.w[i] * sum;
  });
  return std::sqrt(acc[0]);
}

double hs_norm(const GfemFunction& f, const QuadRule& rule, int s) {
  return hs_jet_norm([&](Vec2 x) { return f.jet(x); }, rule, s);
}

double hs_norm(const std::function<Jet2(Vec2)>& f, const QuadRule& rule,
               int s) {
  return hs_jet_norm(f, rule, s);
}

ErrorNorms error_norms(const GfemFunction& u, const SmoothFn& ref,
                       const QuadRule& rule) {
  return error_impl(u, ref, rule);
}

ErrorNorms error_norms(const GfemFunction& u, const GfemFunction& ref,
                       const QuadRule& rule) {
  return error_impl(u, ref, rule);
}

QuadRule region_rule(const AdmissibleSet& A, int n1d) {
  return cells_rule(A.region.cell_boxes(), n1d);
}

QuadRule disk_region_rule(Vec2 c, double r, double cell) {
  const double step = std::max(cell, 1e-12);
  const int nr = std::max(6, (int)std::ceil(r / step));
  const int nt = std::max(16, (int)std::ceil(2 * M_PI * r / step));
  return polar_ball_rule(c, r, nr, nt);
}

SobolevGram::SobolevGram(QuadRule rule, Box2 bbox, int s, int N)
    : rule_(std::move(rule)), box_(bbox), s_(s), N_(N) {
  build();
}

SobolevGram::SobolevGram(QuadRule rule, Vec2 center, double radius, int s,
                         int N, bool compact)
    : rule_(std::move(rule)),
      box_{center - Vec2{radius, radius}, center + Vec2{radius, radius}},
      s_(s),
      N_(N) {
  if (compact) cutoff_.emplace(center, 0.70 * radius, 0.97 * radius);
  build();
}

void SobolevGram::test_jets(Vec2 x, Jet2* out) const {
  const int n1 = N_ + 1;
  std::array<Leg, 32> px, py;
  const double sx = 2.0 / (box_.hi.x - box_.lo.x);
  const double sy = 2.0 / (box_.hi.y - box_.lo.y);
  const double tx = sx * (x.x - box_.lo.x) - 1.0;
  const double ty = sy * (x.y - box_.lo.y) - 1.0;
  legendre_line(tx, N_, px.data());
  legendre_line(ty, N_, py.data());
  Jet2 cut;
  if (cutoff_) cut = cutoff_->jet(x);
  for (int a = 0; a < n1; ++a)
    for (int b = 0; b < n1; ++b) {
      Jet2 T;
      T.v = px[a].v * py[b].v;
      T.gx = px[a].d1 * sx * py[b].v;
      T.gy = px[a].v * py[b].d1 * sy;
      T.hxx = px[a].d2 * sx * sx * py[b].v;
      T.hxy = px[a].d1 * sx * py[b].d1 * sy;
      T.hyy = px[a].v * py[b].d2 * sy * sy;
      out[a * n1 + b] = cutoff_ ? T * cut : T;
    }
}

void SobolevGram::build() {
  if (s_ < 0 || s_ > 2) throw Error("dual Sobolev order must be 0, 1, or 2");
  if (N_ < 0 || N_ > 30) throw Error("test degree must be between 0 and 30");
  if (rule_.size() == 0) throw Error("region rule has no points");
  if (!(box_.hi.x > box_.lo.x && box_.hi.y > box_.lo.y))
    throw Error("degenerate bounding box");

  // Parametrize the span on the concentric 1/sqrt(2)-scaled copy of the
  // box: the span of the family is unchanged, but no test direction is
  // left concentrated on box corners that the region never reaches, which
  // would otherwise degenerate the Gram.
  const Vec2 mid = box_.center();
  const Vec2 half = box_.extent() * (0.5 / std::sqrt(2.0));
  box_ = {mid - half, mid + half};

  const int nt = n_tests();
  const size_t np = rule_.size();
  const int threads = np >= 2048 ? 4 : 1;
  std::vector<RowMat> parts(threads, RowMat::Zero(nt, nt));
  auto sweep = [&](int t) {
    const size_t i0 = np * t / threads, i1 = np * (t + 1) / threads;
    std::vector<Jet2> J(nt);
    std::vector<double> ch(nt);
    RowMat& G = parts[t];
    for (size_t i = i0; i < i1; ++i) {
      test_jets(rule_.point(i), J.data());
      const double w = rule_.w[i];
      for (int k = 0; k < nt; ++k) ch[k] = J[k].v;
      kernels::syr_upper(G.data(), nt, ch.data(), w, nt);
      if (s_ >= 1) {
        for (int k = 0; k < nt; ++k) ch[k] = J[k].gx;
        kernels::syr_upper(G.data(), nt, ch.data(), w, nt);
        for (int k = 0; k < nt; ++k) ch[k] = J[k].gy;
        kernels::syr_upper(G.data(), nt, ch.data(), w, nt);
      }
      if (s_ >= 2) {
        for (int k = 0; k < nt; ++k) ch[k] = J[k].hxx;
        kernels::syr_upper(G.data(), nt, ch.data(), w, nt);
        for (int k = 0; k < nt; ++k) ch[k] = J[k].hxy;
        kernels::syr_upper(G.data(), nt, ch.data(), w, nt);
        for (int k = 0; k < nt; ++k) ch[k] = J[k].hyy;
        kernels::syr_upper(G.data(), nt, ch.data(), w, nt);
      }
    }
  };
  if (threads == 1) {
    sweep(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(sweep, t);
    for (auto& th : pool) th.join();
  }

  RowMat upper = RowMat::Zero(nt, nt);
  for (int t = 0; t < threads; ++t) upper += parts[t];
  G_ = Eigen::MatrixXd(upper).selfadjointView<Eigen::Upper>();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G_);
  if (es.info() != Eigen::Success)
    throw DegenerateBasis("test family Gram eigensolve failed");
  eval_ = es.eigenvalues();
  evec_ = es.eigenvectors();
  const double lmax = eval_(nt - 1);
  if (!(lmax > 0) || eval_(0) <= 1e-12 * lmax)
    throw DegenerateBasis("test family degenerates on the region");
}

Eigen::VectorXd SobolevGram::pairings(
    const std::function<double(Vec2)>& f) const {
  const int nt = n_tests();
  const size_t np = rule_.size();
  const int threads = np >= 2048 ? 4 : 1;
  std::vector<Eigen::VectorXd> parts(threads, Eigen::VectorXd::Zero(nt));
  auto sweep = [&](int t) {
    const size_t i0 = np * t / threads, i1 = np * (t + 1) / threads;
    std::vector<Jet2> J(nt);
    Eigen::VectorXd& b = parts[t];
    for (size_t i = i0; i < i1; ++i) {
      const Vec2 x = rule_.point(i);
      test_jets(x, J.data());
      const double wf = rule_.w[i] * f(x);
      for (int k = 0; k < nt; ++k) b[k] += wf * J[k].v;
    }
  };
  if (threads == 1) {
    sweep(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(sweep, t);
    for (auto& th : pool) th.join();
  }
  Eigen::VectorXd b = Eigen::VectorXd::Zero(nt);
  for (int t = 0; t < threads; ++t) b += parts[t];
  return b;
}

double SobolevGram::dual_norm(const std::function<double(Vec2)>& f) const {
  return dual_norm_from(pairings(f));
}

double SobolevGram::dual_norm_from(const Eigen::VectorXd& b) const {
  const Eigen::VectorXd y = evec_.transpose() * b;
  double sum = 0;
  for (int k = 0; k < y.size(); ++k) sum += y[k] * y[k] / eval_[k];
  return std::sqrt(sum);
}

double SobolevGram::test_norm(const Eigen::VectorXd& c) const {
  return std::sqrt(c.dot(G_ * c));
}

double SobolevGram::test_value(const Eigen::VectorXd& c, Vec2 x) const {
  const int nt = n_tests();
  std::vector<Jet2> J(nt);
  test_jets(x, J.data());
  double v = 0;
  for (int k = 0; k < nt; ++k) v += c[k] * J[k].v;
  return v;
}

double dual_norm(const std::function<double(Vec2)>& f, const AdmissibleSet& A,
                 int s, int N) {
  const auto boxes = A.region.cell_boxes();
  if (boxes.empty()) throw Error("admissible region has no cells");
  Box2 bb = boxes[0];
  for (const Box2& b : boxes) {
    bb.lo.x = std::min(bb.lo.x, b.lo.x);
    bb.lo.y = std::min(bb.lo.y, b.lo.y);
    bb.hi.x = std::max(bb.hi.x, b.hi.x);
    bb.hi.y = std::max(bb.hi.y, b.hi.y);
  }
  return SobolevGram(cells_rule(boxes, 3), bb, s, N).dual_norm(f);
}

void circle_harmonics(const NeumannData& g, int n_max, int samples, double& c0,
                      std::vector<double>& p, std::vector<double>& q) {
  if (n_max < 1) throw Error("harmonic cutoff must be positive");
  const int M = std::max(samples, 8 * n_max);
  p.assign(n_max + 1, 0.0);
  q.assign(n_max + 1, 0.0);
  c0 = 0;
  if (g.density) {
    for (int k = 0; k < M; ++k) {
      const double th = 2 * M_PI * k / M;
      const double gv = g.density(th);
      c0 += gv;
      for (int n = 1; n <= n_max; ++n) {
        p[n] += gv * std::cos(n * th);
        q[n] += gv * std::sin(n * th);
      }
    }
    c0 /= M;
    for (int n = 1; n <= n_max; ++n) {
      p[n] *= 2.0 / M;
      q[n] *= 2.0 / M;
    }
  }
  for (const BoundaryAtom& a : g.atoms) {
    const double w = a.weight, th0 = a.s;
    switch (a.order) {
      case 0:
        c0 += w / (2 * M_PI);
        for (int n = 1; n <= n_max; ++n) {
          p[n] += (w / M_PI) * std::cos(n * th0);
          q[n] += (w / M_PI) * std::sin(n * th0);
        }
        break;
      case 1:
        for (int n = 1; n <= n_max; ++n) {
          p[n] += (w / M_PI) * n * std::sin(n * th0);
          q[n] -= (w / M_PI) * n * std::cos(n * th0);
        }
        break;
      case 2:
        for (int n = 1; n <= n_max; ++n) {
          p[n] -= (w / M_PI) * n * n * std::cos(n * th0);
          q[n] -= (w / M_PI) * n * n * std::sin(n * th0);
        }
        break;
      default:
        throw Error("atom order must be 0, 1, or 2");
    }
  }
}

namespace {

double circle_fourier_norm(const NeumannData& g, double t, int n_max,
                           int samples) {
  double c0 = 0;
  std::vector<double> p, q;
  circle_harmonics(g, n_max, samples, c0, p, q);
  double nrm2 = 2 * M_PI * c0 * c0;
  for (int n = 1; n <= n_max; ++n)
    nrm2 +=
        M_PI * std::pow(1.0 + (double)n * n, t) * (p[n] * p[n] + q[n] * q[n]);
  return std::sqrt(nrm2);
}

}  // namespace

double boundary_fourier_norm(const NeumannData& g, double t, int n_max,
                             int samples) {
  return circle_fourier_norm(g, t, n_max, samples);
}

double boundary_fourier_norm(const std::function<double(double)>& g, double t,
                             int n_max, int samples) {
  if (!g) throw Error("trace function is empty");
  NeumannData wrapped;
  wrapped.density = g;
  return circle_fourier_norm(wrapped, t, n_max, samples);
}

double fourier_norm_plane(const std::function<double(double)>& profile,
                          double s) {
  if (!profile) throw Error("profile function is empty");
  std::vector<double> gn, gw;
  gauss_legendre(32, gn, gw);
  auto segment = [&](double a, double b) {
    double sum = 0;
    for (int k = 0; k < 32; ++k) {
      const double rho = a + (b - a) * gn[k];
      const double v = profile(rho);
      sum += (b - a) * gw[k] * std::pow(1.0 + rho * rho, s) * v * v * rho;
    }
    return sum / (2 * M_PI);
  };
  double total = segment(0, 1);
  double prev = std::numeric_limits<double>::infinity();
  int flat = 0;
  double a = 1;
  for (int oct = 0; oct < 400; ++oct) {
    const double b = 2 * a;
    const double seg = segment(a, b);
    total += seg;
    if (seg > 1e-14 * std::max(total, 1e-300) && seg >= 0.999 * prev) {
      if (++flat >= 3) return std::numeric_limits<double>::infinity();
    } else {
      flat = 0;
    }
    prev = seg;
    a = b;
    if (oct >= 1 && seg <= 1e-13 * std::max(total, 1e-300)) break;
  }
  return std::sqrt(total);
}

HsGrams build_hs_grams(const GfemSpace& space, const AssemblyOptions& opts) {
  HsGrams out;
  const System sys = assemble(space, opts);
  out.g[0] = sys.M;
  out.g[1] = sys.M + sys.K;
  out.g[2] = out.g[1] + assemble_hess_gram(space, opts);
  out.h = space.covering().h();
  out.n = space.size();
  return out;
}

double inverse_constant(const HsGrams& grams, int i, int j, uint64_t seed) {
  if (i < 0 || j < i || j > 2)
    throw Error("orders must satisfy 0 <= i <= j <= 2");
  if (i == j) return 1.0;
  const auto& Gi = grams.g[i];
  const auto& Gj = grams.g[j];
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(Gi);
  if (ldlt.info() != Eigen::Success)
    throw SingularSystem("lower-order Gram is not positive definite");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::VectorXd x(grams.n);
  for (int k = 0; k < grams.n; ++k) x[k] = nd(rng);
  x /= std::sqrt(x.dot(Gi * x));

  double lam = 0, prev = 0;
  for (int it = 0; it < 300; ++it) {
    const Eigen::VectorXd z = Gj * x;
    lam = x.dot(z) / x.dot(Gi * x);
    const Eigen::VectorXd y = ldlt.solve(z);
    x = y / std::sqrt(y.dot(Gi * y));
    if (it > 8 && std::abs(lam - prev) <= 1e-9 * std::abs(lam)) break;
    prev = lam;
  }
  return std::pow(grams.h, j - i) * std::sqrt(lam);
}

double dual_inverse_constant(const HsGrams& grams, int s, int n_samples,
                             uint64_t seed) {
  if (s < 0 || s > 2) throw Error("order must be 0, 1, or 2");
  if (n_samples < 1) throw Error("need at least one sample");
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(grams.g[s]);
  if (ldlt.info() != Eigen::Success)
    throw SingularSystem("Gram is not positive definite");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_samples; ++k) {
    Eigen::VectorXd c(grams.n);
    for (int a = 0; a < grams.n; ++a) c[a] = nd(rng);
    const Eigen::VectorXd b = grams.g[0] * c;
    const double l22 = c.dot(b);
    if (!(l22 > 0)) continue;
    const double dual2 = b.dot(ldlt.solve(b));
    best = std::min(best, std::sqrt(dual2 / l22));
  }
  return best / std::pow(grams.h, s);
}

}  // namespace pumice
