// Copyright (c) 2026 the pumice authors
// SPDX-License-Identifier: Apache-2.0

#include "pumice/polynomial.hpp"

#include <cmath>

namespace pumice {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double unit_ball_moment(int p, int q) {
  if (p % 2 || q % 2) return 0;
  // 2 pi (p-1)!! (q-1)!! / (p+q)!! / (p+q+2)
  auto dfact = [](int n) {
    double r = 1;
    for (int i = n; i > 1; i -= 2) r *= i;
    return r;
  };
  return 2 * M_PI * dfact(p - 1) * dfact(q - 1) / dfact(p + q) / (p + q + 2);
}

Poly2::Poly2(int degree, Vec2 center, double scale)
    : degree_(degree), center_(center), scale_(scale),
      c_(monomial_count(degree), 0.0) {}

Poly2 Poly2::monomial(int p, int q, Vec2 center, double scale) {
  Poly2 r(p + q, center, scale);
  r.coeff(p, q) = 1.0;
  return r;
}

double Poly2::eval(Vec2 x) const {
  const double X = (x.x - center_.x) / scale_;
  const double Y = (x.y - center_.y) / scale_;
  double xp[16], yp[16];
  xp[0] = yp[0] = 1;
  for (int i = 1; i <= degree_; ++i) {
    xp[i] = xp[i - 1] * X;
    yp[i] = yp[i - 1] * Y;
  }
  double v = 0;
  int idx = 0;
  for (int k = 0; k <= degree_; ++k)
    for (int q = 0; q <= k; ++q, ++idx) v += c_[idx] * xp[k - q] * yp[q];
  return v;
}

Jet2 Poly2::jet(Vec2 x) const {
  const double X = (x.x - center_.x) / scale_;
  const double Y = (x.y - center_.y) / scale_;
  double xp[16], yp[16];
  xp[0] = yp[0] = 1;
  for (int i = 1; i <= degree_; ++i) {
    xp[i] = xp[i - 1] * X;
    yp[i] = yp[i - 1] * Y;
  }
  auto pw = [](const double* t, int e) { return e < 0 ? 0.0 : t[e]; };
  Jet2 j;
  int idx = 0;
  for (int k = 0; k <= degree_; ++k)
    for (int q = 0; q <= k; ++q, ++idx) {
      const double a = c_[idx];
      if (a == 0) continue;
      const int p = k - q;
      j.v += a * xp[p] * yp[q];
      j.gx += a * p * pw(xp, p - 1) * yp[q];
      j.gy += a * q * xp[p] * pw(yp, q - 1);
      j.hxx += a * p * (p - 1) * pw(xp, p - 2) * yp[q];
      j.hxy += a * p * q * pw(xp, p - 1) * pw(yp, q - 1);
      j.hyy += a * q * (q - 1) * xp[p] * pw(yp, q - 2);
    }
  const double is = 1.0 / scale_, is2 = is * is;
  j.gx *= is;
  j.gy *= is;
  j.hxx *= is2;
  j.hxy *= is2;
  j.hyy *= is2;
  return j;
}

Poly2 Poly2::deriv_x() const {
  Poly2 r(std::max(degree_ - 1, 0), center_, scale_);
  for (const auto& m : monomials_up_to(degree_)) {
    if (m.px == 0) continue;
    r.coeff(m.px - 1, m.py) += m.px * coeff(m.px, m.py) / scale_;
  }
  return r;
}

Poly2 Poly2::deriv_y() const {
  Poly2 r(std::max(degree_ - 1, 0), center_, scale_);
  for (const auto& m : monomials_up_to(degree_)) {
    if (m.py == 0) continue;
    r.coeff(m.px, m.py - 1) += m.py * coeff(m.px, m.py) / scale_;
  }
  return r;
}

Poly2 Poly2::operator*(double s) const {
  Poly2 r = *this;
  for (double& v : r.c_) v *= s;
  return r;
}

Poly2& Poly2::operator+=(const Poly2& o) {
  if (o.degree_ > degree_) {
    Poly2 grown(o.degree_, center_, scale_);
    std::copy(c_.begin(), c_.end(), grown.c_.begin());
    *this = grown;
  }
  for (size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

Poly2 Poly2::operator*(const Poly2& o) const {
  Poly2 r(degree_ + o.degree_, center_, scale_);
  const auto ma = monomials_up_to(degree_);
  const auto mb = monomials_up_to(o.degree_);
  for (size_t i = 0; i < ma.size(); ++i) {
    if (c_[i] == 0) continue;
    for (size_t j = 0; j < mb.size(); ++j) {
      if (o.c_[j] == 0) continue;
      r.coeff(ma[i].px + mb[j].px, ma[i].py + mb[j].py) += c_[i] * o.c_[j];
    }
  }
  return r;
}

Poly2 Poly2::rebased(Vec2 new_center, double new_scale, int new_degree) const {
  if (new_degree < 0) new_degree = degree_;
  Poly2 r(new_degree, new_center, new_scale);
  // X_old = a + b X_new, componentwise.
  const double b = new_scale / scale_;
  const double ax = (new_center.x - center_.x) / scale_;
  const double ay = (new_center.y - center_.y) / scale_;
  double bp[16];
  bp[0] = 1;
  for (int i = 1; i <= degree_ + 1; ++i) bp[i] = bp[i - 1] * b;
  for (const auto& m : monomials_up_to(degree_)) {
    const double a = coeff(m.px, m.py);
    if (a == 0) continue;
    for (int i = 0; i <= m.px; ++i) {
      const double fx = binomial(m.px, i) * bp[i] * std::pow(ax, m.px - i);
      if (fx == 0) continue;
      for (int j = 0; j <= m.py; ++j) {
        const double fy = binomial(m.py, j) * bp[j] * std::pow(ay, m.py - j);
        if (fy == 0 || i + j > new_degree) continue;
        r.coeff(i, j) += a * fx * fy;
      }
    }
  }
  return r;
}

Eigen::MatrixXd deriv_x_matrix(int deg) {
  const int n = monomial_count(deg);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (const auto& m : monomials_up_to(deg))
    if (m.px > 0)
      D(mono_index(m.px - 1, m.py), mono_index(m.px, m.py)) = m.px;
  return D;
}

Eigen::MatrixXd deriv_y_matrix(int deg) {
  const int n = monomial_count(deg);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (const auto& m : monomials_up_to(deg))
    if (m.py > 0)
      D(mono_index(m.px, m.py - 1), mono_index(m.px, m.py)) = m.py;
  return D;
}

Eigen::MatrixXd gram_unit_ball(int deg) {
  const int n = monomial_count(deg);
  const auto mono = monomials_up_to(deg);
  Eigen::MatrixXd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      G(i, j) = unit_ball_moment(mono[i].px + mono[j].px,
                                 mono[i].py + mono[j].py);
  return G;
}

}  // namespace pumice
