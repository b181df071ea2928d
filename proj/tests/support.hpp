#pragma once
// Shared helpers for the unit tests and the acceptance gate: deterministic
// random tensors, a full manufactured-problem solve wrapper, and dense
// re-computations of the per-vertex quantities (weak stress, coercivity
// measure) written with plain loops so they can serve as oracles for the
// production assembly.
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/SVD>

#include "mpsaw/bc.hpp"
#include "mpsaw/discretize.hpp"
#include "mpsaw/material.hpp"
#include "mpsaw/mesh.hpp"
#include "mpsaw/metrics.hpp"
#include "mpsaw/mms.hpp"
#include "mpsaw/system.hpp"

namespace testsup {

using namespace mpsaw;
using Eigen::Matrix3d;
using Eigen::MatrixXd;
using Eigen::VectorXd;

inline Matrix3d random_gradient(std::mt19937_64& rng, int dim) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix3d A = Matrix3d::Zero();
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) A(i, j) = u(rng);
  return A;
}

struct SolveOutput {
  Mesh mesh;
  SubGeometry sg;
  Discretization disc;
  DisplacementField field;
  TractionField tractions;
  double eps_d = 0.0, eps_pi = 0.0;
};

// Dirichlet-everywhere solve of an analytic case on a prebuilt mesh.
inline SolveOutput solve_case(Mesh m, const ManufacturedCase& mc,
                              const IsotropicField& mat,
                              DiscOptions opt = {}) {
  SolveOutput out;
  out.sg = compute_subgeometry(m, std::string("auto"));
  BoundaryConditions bc = dirichlet_all(m, mc.u);
  out.disc = discretize_all(m, out.sg, mat, bc, opt);
  const VectorXd bvals = boundary_values(m, out.sg, out.disc, bc);
  GlobalSystem sys = assemble(m, out.disc, mc.body_force, bvals);
  out.field = solve(sys);
  out.tractions = face_tractions(m, out.disc, out.field, bvals);
  out.eps_d = displacement_error(m, out.field, mc);
  out.eps_pi = stress_error(m, out.tractions, mc);
  out.mesh = std::move(m);
  return out;
}

// Patch-test residuals for u = A x + b on a homogeneous material.
inline std::pair<double, double> patch_residual(Mesh m, const Matrix3d& A,
                                                const Vec3& b, double mu,
                                                double lambda) {
  ManufacturedCase mc = linear_case(m.dim, A, b, mu, lambda);
  IsotropicField mat = uniform_field(m, mu, lambda);
  SolveOutput out = solve_case(std::move(m), mc, mat);
  return {out.eps_d, out.eps_pi};
}

// Sub-cell average weights of one interaction region, recomputed from
// scratch (volume-proportional or uniform).
inline std::vector<double> patch_weights(const InteractionRegion& r,
                                         AvgWeights mode) {
  const int C = int(r.cells.size());
  std::vector<double> w(C, 1.0 / double(C));
  if (mode == AvgWeights::Uniform) return w;
  double tot = 0.0;
  for (double v : r.subvol) tot += v;
  for (int lc = 0; lc < C; ++lc) w[lc] = r.subvol[lc] / tot;
  return w;
}

// Weak stress of every sub-cell in a region for given gradients: the cell
// stress plus the transposed patch average, halved.
inline std::vector<Matrix3d> weak_stresses(const InteractionRegion& r,
                                           const IsotropicField& mat,
                                           const std::vector<Matrix3d>& G,
                                           int dim, AvgWeights wmode) {
  const int C = int(r.cells.size());
  std::vector<Matrix3d> full(C);
  for (int lc = 0; lc < C; ++lc)
    full[lc] = apply_stiffness(mat.mu[r.cells[lc]], mat.lambda[r.cells[lc]],
                               G[lc], dim);
  Matrix3d avg = Matrix3d::Zero();
  const std::vector<double> w = patch_weights(r, wmode);
  for (int lc = 0; lc < C; ++lc) avg += w[lc] * full[lc];
  std::vector<Matrix3d> pi(C);
  for (int lc = 0; lc < C; ++lc)
    pi[lc] = 0.5 * (full[lc] + avg.transpose());
  return pi;
}

// Gradients of each region sub-cell for stacked cell/boundary values, via the
// local solve.
inline std::vector<Matrix3d> region_gradients(const InteractionRegion& r,
                                              const Mesh& m,
                                              const IsotropicField& mat,
                                              const DiscOptions& opt,
                                              const VectorXd& vals) {
  LocalSystem sys = assemble_local(r, m, mat, opt);
  LocalSolve ls = solve_local(sys, r.vertex);
  const VectorXd g = ls.G * vals;
  const int D = m.dim, C = int(r.cells.size());
  std::vector<Matrix3d> G(C, Matrix3d::Zero());
  for (int lc = 0; lc < C; ++lc)
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) G[lc](i, j) = g[(lc * D + i) * D + j];
  return G;
}

// Weighted patch asymmetry of the weak stress, which the averaging
// construction must cancel for any input field (same weights in sum and
// average).
inline double weak_symmetry_residual(const InteractionRegion& r, const Mesh& m,
                                     const IsotropicField& mat,
                                     const DiscOptions& opt,
                                     std::mt19937_64& rng) {
  const int D = m.dim, C = int(r.cells.size());
  const int ncols = D * C + D * r.n_boundary;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  VectorXd vals(ncols);
  for (int i = 0; i < ncols; ++i) vals[i] = u(rng);
  const std::vector<Matrix3d> G = region_gradients(r, m, mat, opt, vals);
  const std::vector<Matrix3d> pi = weak_stresses(r, mat, G, D, opt.weights);
  const std::vector<double> w = patch_weights(r, opt.weights);
  Matrix3d acc = Matrix3d::Zero();
  double scale = 1e-300;
  for (int lc = 0; lc < C; ++lc) {
    acc += w[lc] * (pi[lc] - pi[lc].transpose());
    scale = std::max(scale, w[lc] * pi[lc].norm());
  }
  return acc.norm() / scale;
}

// Dense recomputation of the region coercivity measure: tractions paired
// with test-value jumps against the sub-cell strain energy, minimized over
// the orthogonal complement of rigid motions. Vertex averaging, volume
// weights, homogeneous boundary closure; everything below is plain loops so
// it is an independent check of the production assembly.
inline double oracle_theta(const InteractionRegion& r, const Mesh& m,
                           const IsotropicField& mat, const DiscOptions& opt) {
  const int D = m.dim, C = int(r.cells.size());
  if (C < 2) return std::numeric_limits<double>::quiet_NaN();
  const int n = D * C;
  const int ncols = n + D * r.n_boundary;

  auto grad_of = [&](const VectorXd& cellvals) {
    VectorXd vals = VectorXd::Zero(ncols);
    vals.head(n) = cellvals;
    return region_gradients(r, m, mat, opt, vals);
  };

  // quadratic forms evaluated one vector at a time
  auto b_of = [&](const VectorXd& v) {
    const std::vector<Matrix3d> G = grad_of(v);
    const std::vector<Matrix3d> pi = weak_stresses(r, mat, G, D, opt.weights);
    double acc = 0.0;
    for (const RegionSubface& sf : r.subfaces) {
      Vec3 T = sf.area * (pi[sf.lc0] * sf.normal);
      Vec3 face_val = Vec3::Zero();
      if (!(sf.lc1 < 0 && sf.bc == BCType::Dirichlet)) {
        const Vec3 d0 = sf.xc - m.cells[r.cells[sf.lc0]].center;
        for (int i = 0; i < D; ++i) {
          face_val[i] = v[sf.lc0 * D + i];
          for (int j = 0; j < D; ++j) face_val[i] += G[sf.lc0](i, j) * d0[j];
        }
      }
      Vec3 jump0 = face_val;
      for (int i = 0; i < D; ++i) jump0[i] -= v[sf.lc0 * D + i];
      acc += 2.0 * jump0.dot(T);
      if (sf.lc1 >= 0) {
        Vec3 jump1 = face_val;
        for (int i = 0; i < D; ++i) jump1[i] -= v[sf.lc1 * D + i];
        acc -= 2.0 * jump1.dot(T);
      }
    }
    return acc;
  };
  auto e_of = [&](const VectorXd& v) {
    const std::vector<Matrix3d> G = grad_of(v);
    double acc = 0.0;
    for (int lc = 0; lc < C; ++lc) {
      const double mu = mat.mu[r.cells[lc]], la = mat.lambda[r.cells[lc]];
      double gg = 0.0, tr = 0.0;
      for (int i = 0; i < D; ++i) {
        tr += G[lc](i, i);
        for (int j = 0; j < D; ++j) gg += G[lc](i, j) * G[lc](i, j);
      }
      acc += r.subvol[lc] * (2.0 * mu * gg + la * tr * tr);
    }
    return acc;
  };

  // polarization to full matrices
  MatrixXd B(n, n), E(n, n);
  std::vector<double> qb(n), qe(n);
  for (int i = 0; i < n; ++i) {
    VectorXd e = VectorXd::Zero(n);
    e[i] = 1.0;
    qb[i] = b_of(e);
    qe[i] = e_of(e);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      VectorXd e = VectorXd::Zero(n);
      e[i] += 1.0;
      e[j] += 1.0;
      if (i == j) {
        B(i, i) = qb[i];
        E(i, i) = qe[i];
      } else {
        B(i, j) = B(j, i) = 0.5 * (b_of(e) - qb[i] - qb[j]);
        E(i, j) = E(j, i) = 0.5 * (e_of(e) - qe[i] - qe[j]);
      }
    }

  // rigid motions about the vertex
  const Vec3 xs = m.verts[r.vertex];
  const int nrot = D == 2 ? 1 : 3;
  MatrixXd rigid = MatrixXd::Zero(n, D + nrot);
  for (int lc = 0; lc < C; ++lc) {
    const Vec3 d = m.cells[r.cells[lc]].center - xs;
    for (int i = 0; i < D; ++i) rigid(lc * D + i, i) = 1.0;
    if (D == 2) {
      rigid(lc * D + 0, 2) = -d[1];
      rigid(lc * D + 1, 2) = d[0];
    } else {
      for (int a = 0; a < 3; ++a) {
        const Vec3 w = Vec3::Unit(a).cross(d);
        for (int i = 0; i < 3; ++i) rigid(lc * D + i, D + a) = w[i];
      }
    }
  }
  Eigen::JacobiSVD<MatrixXd> svd(rigid, Eigen::ComputeFullU);
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > 1e-12 * svd.singularValues()[0]) ++rank;
  const MatrixXd Cm = svd.matrixU().rightCols(n - rank);

  const MatrixXd Bc = Cm.transpose() * (0.5 * (B + B.transpose())) * Cm;
  MatrixXd Ec = Cm.transpose() * E * Cm;
  Ec = 0.5 * (Ec + Ec.transpose()).eval();

  // generalized eigenvalues via Cholesky reduction
  Eigen::LLT<MatrixXd> llt(Ec);
  const MatrixXd L = llt.matrixL();
  const MatrixXd W = L.triangularView<Eigen::Lower>().solve(Bc);
  const MatrixXd M =
      L.triangularView<Eigen::Lower>().solve(W.transpose()).transpose();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (M + M.transpose()));
  return es.eigenvalues().minCoeff();
}

}  // namespace testsup
