// Copyright (c) 2026 the pumice authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "pumice/localspace.hpp"
#include "pumice/partition.hpp"
#include "pumice/quadrature.hpp"

namespace pumice {

// Trial space: u = sum_j phi_j v_j with v_j a polynomial of degree <= m in
// the scaled frame of patch j. Degrees of freedom are blocked per patch in
// graded lexicographic monomial order, the constant slot first.
class GfemSpace {
 public:
  GfemSpace(std::shared_ptr<const PartitionOfUnity> pu, int degree);

  const PartitionOfUnity& pu() const { return *pu_; }
  std::shared_ptr<const PartitionOfUnity> pu_ptr() const { return pu_; }
  const Covering& covering() const { return pu_->covering(); }
  int degree() const { return degree_; }
  int block() const { return block_; }
  int size() const { return (int)pu_->size() * block_; }
  int n_patches() const { return (int)pu_->size(); }

  int dof(int j, int a) const { return j * block_ + a; }
  PolyBasis basis(int j) const;

  // Coefficient vector representing the constant function `val`.
  Eigen::VectorXd constant_coeffs(double val) const;
  // Coefficient vector representing a global polynomial (rebased per patch;
  // requires p.degree() <= degree()).
  Eigen::VectorXd polynomial_coeffs(const Poly2& p) const;

  double value(const Eigen::VectorXd& c, Vec2 x) const;
  Jet2 jet(const Eigen::VectorXd& c, Vec2 x) const;

 private:
  std::shared_ptr<const PartitionOfUnity> pu_;
  int degree_ = 1;
  int block_ = 3;
};

struct GfemFunction {
  std::shared_ptr<const GfemSpace> space;
  Eigen::VectorXd c;

  double value(Vec2 x) const { return space->value(c, x); }
  Jet2 jet(Vec2 x) const { return space->jet(c, x); }
  Vec2 gradient(Vec2 x) const {
    const Jet2 J = space->jet(c, x);
    return {J.gx, J.gy};
  }
};

struct AssemblyOptions {
  double leaf_factor = 0.125;  // volume cell target, in units of h
  int gauss_1d = 5;            // tensor Gauss order per cell
  double ring_refine = 0.5;    // cell target near the zeta rings, in units of rho
  int threads = 4;             // fixed thread count, chunk merge order is pinned

  // Preset whose consistency error sits near 1e-7 (values) and a few 1e-6
  // (gradients), independent of h; about 6x the default cost.
  static AssemblyOptions accurate() { return {0.125, 6, 0.25, 4}; }
};

// Stiffness K (gradient-gradient), mass M, and the mean-value functional
// q_i = integral of Phi_i, so q^T c is the mean of the represented function
// times the area.
struct System {
  Eigen::SparseMatrix<double> K, M;
  Eigen::VectorXd q;
  double area = 0;
};

System assemble(const GfemSpace& space, const AssemblyOptions& opts = {});

// Gram of second derivatives, summed over the channels xx, xy, yy with the
// mixed one counted once, by the same volume rule as assemble().
Eigen::SparseMatrix<double> assemble_hess_gram(const GfemSpace& space,
                                               const AssemblyOptions& opts = {});

// Jet of X^p Y^q in the frame X = (x - center) / scale.
Jet2 mono_jet(Vec2 center, double scale, int p, int q, Vec2 x);

// Boundary data for the Neumann problem: an integrable density in arc
// length plus point atoms. An atom of order d pairs with a test function v
// as weight * (-d/ds)^d v(gamma(s)), the distributional action of the d-th
// derivative of a point mass.
struct BoundaryAtom {
  double s = 0;
  int order = 0;  // 0, 1, or 2
  double weight = 1;
};

struct NeumannData {
  std::function<double(double)> density;  // may be empty
  std::vector<BoundaryAtom> atoms;
  // Relative tolerance on the compatibility defect <g, 1>; infinity skips
  // the check.
  double compat_tol = 1e-6;
};

// Load vector b_i = <g, Phi_i>. Throws CompatibilityError when <g, 1>
// exceeds compat_tol relative to the data's mass scale. panels = 0 picks
// enough panels to resolve the trial functions' boundary traces.
Eigen::VectorXd assemble_rhs(const GfemSpace& space, const NeumannData& g,
                             int panels = 0, int n1d = 8);

// Total action on constants, <g, 1>, by the same quadrature.
double data_mean(const GfemSpace& space, const NeumannData& g, int panels = 0,
                 int n1d = 8);

struct SolveInfo {
  double residual = 0;    // saddle residual, relative to max(1, |b|)
  double lambda = 0;      // multiplier, <g,1>/area for exact arithmetic
  double constraint = 0;  // q^T c of the returned solution
  int path = 0;           // 0 = LDLT, 1 = LU retry, 2 = truncated eigensolve
};

// Zero-mean Galerkin solution of K c = b via the bordered saddle system
// [K q; q^T 0], diagonally equilibrated and factored as symmetric
// indefinite; a sparse LU retry and then an eigenvalue-truncated least-norm
// solve (modes below 1e-12 of the largest magnitude dropped) back the
// factorization up. Throws CompatibilityError when b pairs with the
// constant function above 1e-10 and SingularSystem when every solve path
// fails or the Galerkin residual stays above 1e-8.
GfemFunction solve_neumann(std::shared_ptr<const GfemSpace> space,
                           const System& sys, const Eigen::VectorXd& b,
                           SolveInfo* info = nullptr);

// DOFs of the patches whose support ball lies inside the region of A; the
// corresponding basis functions vanish outside A.
std::vector<int> restrict_to_compact(const GfemSpace& space,
                                     const AdmissibleSet& A);

// Extends `seed` to a function whose energy pairing vanishes against every
// basis function compactly supported in A1: the DOFs listed by
// restrict_to_compact(space, A1) are re-solved with the others fixed.
// `residual` receives the largest constrained pairing, scaled by the matrix
// and coefficient magnitudes; values above 1e-8 throw SingularSystem.
GfemFunction discrete_harmonic(std::shared_ptr<const GfemSpace> space,
                               const System& sys, const AdmissibleSet& A1,
                               const Eigen::VectorXd& seed,
                               double* residual = nullptr);

// Patchwise product transfer: multiplies each local polynomial w_j by rho,
// projects the product back onto the local space in H1(B(x_j, R_j)), and
// blends the pieces with the partition functions. Each residual
// rho * w_j - w~_j has zero mean over the patch ball, so the transfer error
// shrinks one order faster than a generic interpolant. rho needs two
// derivatives.
GfemFunction superapprox_transfer(const SmoothFn& rho, const GfemFunction& w);

// Patch-local quasi-interpolant: v_j is the averaged Taylor polynomial of u
// over the clearance ball B(x_j, rho_j). Reproduces global polynomials of
// degree <= m and inherits u's local smoothness order.
GfemFunction quasi_interpolant(std::shared_ptr<const GfemSpace> space,
                               const SmoothFn& u);

// Patches whose support ball keeps at least `clearance` depth inside the
// domain.
std::vector<int> interior_patches(const GfemSpace& space, double clearance);

// Plain-text dumps for offline inspection. Matrices: a "sparse rows cols
// nnz" header then one "row col value" triplet per line. Vectors: "vector n"
// then "index value" pairs. Samples: "samples count" then "x y value" rows
// on an n_side^2 bounding-box grid clipped to the domain.
void dump_sparse(const Eigen::SparseMatrix<double>& A, const std::string& path);
void dump_vector(const Eigen::VectorXd& v, const std::string& path);
void dump_samples(const GfemFunction& u, int n_side, const std::string& path);

}  // namespace pumice
