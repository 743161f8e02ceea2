// Copyright (c) 2026 the pumice authors
// SPDX-License-Identifier: Apache-2.0

#include "pumice/localspace.hpp"

#include <cmath>

#include "pumice/quadrature.hpp"

namespace pumice {

void PolyBasis::values(Vec2 x, double* out) const {
  const double X = (x.x - center.x) / scale;
  const double Y = (x.y - center.y) / scale;
  double xp[16], yp[16];
  xp[0] = yp[0] = 1;
  for (int i = 1; i <= degree; ++i) {
    xp[i] = xp[i - 1] * X;
    yp[i] = yp[i - 1] * Y;
  }
  int idx = 0;
  for (int k = 0; k <= degree; ++k)
    for (int q = 0; q <= k; ++q, ++idx) out[idx] = xp[k - q] * yp[q];
}

void PolyBasis::values_grads(Vec2 x, double* v, double* gx, double* gy) const {
  const double X = (x.x - center.x) / scale;
  const double Y = (x.y - center.y) / scale;
  const double is = 1.0 / scale;
  double xp[16], yp[16];
  xp[0] = yp[0] = 1;
  for (int i = 1; i <= degree; ++i) {
    xp[i] = xp[i - 1] * X;
    yp[i] = yp[i - 1] * Y;
  }
  int idx = 0;
  for (int k = 0; k <= degree; ++k)
    for (int q = 0; q <= k; ++q, ++idx) {
      const int p = k - q;
      v[idx] = xp[p] * yp[q];
      gx[idx] = p > 0 ? p * xp[p - 1] * yp[q] * is : 0.0;
      gy[idx] = q > 0 ? q * xp[p] * yp[q - 1] * is : 0.0;
    }
}

Poly2 PolyBasis::combination(const double* c) const {
  Poly2 p(degree, center, scale);
  for (int i = 0; i < size(); ++i) p.coeffs()[i] = c[i];
  return p;
}

Eigen::MatrixXd ball_gram_value(int degree, double R, double scale) {
  const double t = R / scale;
  const int n = monomial_count(degree);
  const auto mono = monomials_up_to(degree);
  Eigen::MatrixXd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int k = mono[i].px + mono[j].px + mono[i].py + mono[j].py;
      G(i, j) = R * R * std::pow(t, k) *
                unit_ball_moment(mono[i].px + mono[j].px,
                                 mono[i].py + mono[j].py);
    }
  return G;
}

Eigen::MatrixXd ball_gram_grad(int degree, double R, double scale) {
  const Eigen::MatrixXd G = ball_gram_value(degree, R, scale);
  const Eigen::MatrixXd Dx = deriv_x_matrix(degree);
  const Eigen::MatrixXd Dy = deriv_y_matrix(degree);
  return (Dx.transpose() * G * Dx + Dy.transpose() * G * Dy) /
         (scale * scale);
}

Eigen::MatrixXd ball_gram_hess(int degree, double R, double scale) {
  const Eigen::MatrixXd G = ball_gram_value(degree, R, scale);
  const Eigen::MatrixXd Dx = deriv_x_matrix(degree);
  const Eigen::MatrixXd Dy = deriv_y_matrix(degree);
  const Eigen::MatrixXd Dxx = Dx * Dx, Dxy = Dy * Dx, Dyy = Dy * Dy;
  return (Dxx.transpose() * G * Dxx + 2.0 * Dxy.transpose() * G * Dxy +
          Dyy.transpose() * G * Dyy) /
         (scale * scale * scale * scale);
}

EquivalenceConstants measure_equivalence(int degree, double flat_ratio) {
  if (!(flat_ratio > 0) || !(flat_ratio < 1))
    throw InfeasibleParameters("flat ratio must lie in (0, 1)");
  EquivalenceConstants out;
  out.degree = degree;
  out.flat_ratio = flat_ratio;

  const Eigen::MatrixXd Gf = ball_gram_value(degree, 1.0, 1.0);
  const Eigen::MatrixXd Gt = ball_gram_value(degree, flat_ratio, 1.0);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Gf, Gt);
  out.l2_full_over_flat = std::sqrt(es.eigenvalues().maxCoeff());

  if (degree >= 1) {
    const int n = monomial_count(degree);
    const Eigen::MatrixXd Sf = ball_gram_grad(degree, 1.0, 1.0);
    const Eigen::MatrixXd St = ball_gram_grad(degree, flat_ratio, 1.0);
    // Constants are the seminorm kernel; drop them.
    const auto sub = [n](const Eigen::MatrixXd& M) {
      return Eigen::MatrixXd(M.bottomRightCorner(n - 1, n - 1));
    };
    es.compute(sub(Sf), sub(St));
    out.h1_full_over_flat = std::sqrt(es.eigenvalues().maxCoeff());
    es.compute(sub(Sf), sub(Gf));
    out.inverse_h1 = std::sqrt(es.eigenvalues().maxCoeff());
    if (degree >= 2) {
      const Eigen::MatrixXd Hf = ball_gram_hess(degree, 1.0, 1.0);
      es.compute(sub(Hf), sub(Sf));
      out.inverse_h2 = std::sqrt(es.eigenvalues().maxCoeff());
    }
  }
  return out;
}

Poly2 averaged_taylor(const SmoothFn& u, int m, Vec2 c, double tau,
                      Vec2 frame_center, double frame_scale) {
  if (m > 5) throw Error("averaged Taylor supports degree <= 5");
  Poly2 out(m, frame_center, frame_scale);
  const QuadRule rule = polar_ball_rule(c, tau, m + 5, 4 * m + 16);
  // Normalized bump (1 - r^2/tau^2)^3 with unit mass on the ball.
  const double norm = 4.0 / (M_PI * tau * tau);
  DerivSet du;
  // Factorials up to 5.
  const double fact[6] = {1, 1, 2, 6, 24, 120};
  double fpow[16];
  fpow[0] = 1;
  for (int i = 1; i <= m; ++i) fpow[i] = fpow[i - 1] * frame_scale;
  for (size_t qp = 0; qp < rule.size(); ++qp) {
    const Vec2 y = rule.point(qp);
    const double r2 = (y - c).squared_norm() / (tau * tau);
    const double bump = std::max(0.0, 1 - r2);
    const double wpsi = rule.w[qp] * norm * bump * bump * bump;
    if (wpsi == 0) continue;
    u.derivs(y, m, du);
    const Vec2 d = frame_center - y;
    double dxp[6], dyp[6];
    dxp[0] = dyp[0] = 1;
    for (int i = 1; i <= m; ++i) {
      dxp[i] = dxp[i - 1] * d.x;
      dyp[i] = dyp[i - 1] * d.y;
    }
    // (x - y)^alpha expanded around the frame center:
    // sum_{beta <= alpha} C(a1,b1) C(a2,b2) s^{|beta|} X^beta d^{alpha-beta}.
    for (int a1 = 0; a1 <= m; ++a1)
      for (int a2 = 0; a1 + a2 <= m; ++a2) {
        const double base =
            wpsi * du.at(a1, a2) / (fact[a1] * fact[a2]);
        if (base == 0) continue;
        for (int b1 = 0; b1 <= a1; ++b1)
          for (int b2 = 0; b2 <= a2; ++b2)
            out.coeff(b1, b2) += base * binomial(a1, b1) * binomial(a2, b2) *
                                 fpow[b1 + b2] * dxp[a1 - b1] * dyp[a2 - b2];
      }
  }
  return out;
}

Poly2 h1_ball_projection(const std::function<Jet2(Vec2)>& f, int m, Vec2 c,
                         double R, Vec2 frame_center, double frame_scale) {
  PolyBasis basis{m, frame_center, frame_scale};
  const int n = basis.size();
  // The Grams are exact only for a frame centered at the ball; rebase the
  // problem to a concentric frame and move the result back at the end.
  PolyBasis local{m, c, frame_scale};
  const Eigen::MatrixXd A = ball_gram_grad(m, R, frame_scale) +
                            ball_gram_value(m, R, frame_scale);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  const QuadRule rule = polar_ball_rule(c, R, m + 10, 4 * m + 24);
  std::vector<double> v(n), gx(n), gy(n);
  for (size_t qp = 0; qp < rule.size(); ++qp) {
    const Vec2 y = rule.point(qp);
    const Jet2 j = f(y);
    local.values_grads(y, v.data(), gx.data(), gy.data());
    for (int i = 0; i < n; ++i)
      b[i] += rule.w[qp] * (j.gx * gx[i] + j.gy * gy[i] + j.v * v[i]);
  }
  const Eigen::VectorXd coef = Eigen::LDLT<Eigen::MatrixXd>(A).solve(b);
  Poly2 p = local.combination(coef.data());
  return p.rebased(frame_center, frame_scale);
}

}  // namespace pumice
