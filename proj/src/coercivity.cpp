#include <cmath>
#include <limits>

#include "local_kernels.hpp"
#include "mpsaw/discretize.hpp"

namespace mpsaw::detail {

// Local coercivity measure: minimum generalized eigenvalue of the symmetrized
// region bilinear form against the region energy norm, both restricted to the
// orthogonal complement of rigid motions about the vertex. The form pairs the
// weak (or strong, per method) stress of the trial field with the two-point
// gradient of the test field; expanding that gradient turns it into a sum of
// sub-face tractions (without the 1/2) times test-value jumps, which is how it
// is assembled here. Boundary data is closed homogeneously.
CoercivityEntry coercivity_impl(const RegionKernel& kern, const LocalSolve& ls,
                                const DiscOptions& opt) {
  const InteractionRegion& r = kern.r;
  const int D = kern.D, C = kern.C;
  CoercivityEntry entry;
  entry.vertex = r.vertex;
  if (C < 2) {
    entry.skipped = true;
    entry.theta = std::numeric_limits<double>::quiet_NaN();
    return entry;
  }

  const int n = D * C;
  const Eigen::MatrixXd Gu = ls.G.leftCols(n);

  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
  for (const RegionSubface& sf : r.subfaces) {
    const Eigen::MatrixXd T0 = kern.traction_coeffs(sf, 0) * Gu;
    Eigen::MatrixXd F = Eigen::MatrixXd::Zero(D, n);
    if (!(sf.lc1 < 0 && sf.bc == BCType::Dirichlet)) {
      const Vec3 d0 = sf.xc - kern.xK[sf.lc0];
      for (int i = 0; i < D; ++i) {
        F(i, sf.lc0 * D + i) += 1.0;
        for (int j = 0; j < D; ++j)
          F.row(i) += d0[j] * Gu.row(kern.gcol(sf.lc0, i, j));
      }
    }
    Eigen::MatrixXd V = F;
    for (int i = 0; i < D; ++i) V(i, sf.lc0 * D + i) -= 1.0;
    B += 2.0 * V.transpose() * T0;
    if (sf.lc1 >= 0) {
      V = F;
      for (int i = 0; i < D; ++i) V(i, sf.lc1 * D + i) -= 1.0;
      B -= 2.0 * V.transpose() * T0;  // opposite side carries -T0
    }
  }

  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n, n);
  for (int lc = 0; lc < C; ++lc) {
    const auto GK = Gu.middleRows(lc * D * D, D * D);
    Eigen::RowVectorXd tr = Eigen::RowVectorXd::Zero(n);
    for (int k = 0; k < D; ++k) tr += Gu.row(kern.gcol(lc, k, k));
    E += r.subvol[lc] * (2.0 * kern.mu[lc] * (GK.transpose() * GK) +
                         kern.la[lc] * (tr.transpose() * tr));
  }

  const Vec3 xs = kern.m.verts[r.vertex];
  const int nrot = D == 2 ? 1 : 3;
  Eigen::MatrixXd rigid = Eigen::MatrixXd::Zero(n, D + nrot);
  for (int lc = 0; lc < C; ++lc) {
    const Vec3 d = kern.xK[lc] - xs;
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
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(rigid);
  const int rank = int(qr.rank());
  const Eigen::MatrixXd Q =
      qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd Cm = Q.rightCols(n - rank);

  Eigen::MatrixXd Bc =
      Cm.transpose() * (0.5 * (B + B.transpose())) * Cm;
  Eigen::MatrixXd Ec = Cm.transpose() * E * Cm;
  Ec = 0.5 * (Ec + Ec.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Ec);
  const double emin = es.eigenvalues().minCoeff();
  const double emax = es.eigenvalues().maxCoeff();
  if (!(emax > 0.0) || emin <= 1e-12 * emax) {
    entry.degenerate = true;
    entry.theta = std::numeric_limits<double>::quiet_NaN();
    return entry;
  }
  entry.energy_cond = emax / emin;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(Bc, Ec);
  entry.theta = ges.eigenvalues().minCoeff();
  (void)opt;
  return entry;
}

}  // namespace mpsaw::detail
