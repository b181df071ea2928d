#pragma once
// Shared per-region assembly kernels used by the local-system builder, the
// stencil emitter and the coercivity audit. Internal to the library.
#include <algorithm>
#include <map>
#include <utility>
#include <vector>

#include "mpsaw/discretize.hpp"
#include "mpsaw/errors.hpp"

namespace mpsaw::detail {

using Eigen::MatrixXd;

// Cached per-region data plus the row kernels every consumer shares. Column
// layout of gradient unknowns: ((lc * D + i) * D + j) holds (G_lc)_ij; the
// scalar mode packs grad(u) of cell lc at (lc * D + j).
struct RegionKernel {
  const InteractionRegion& r;
  const Mesh& m;
  const IsotropicField& mat;
  const DiscOptions& opt;
  int D;
  int C;
  bool scalar;
  std::vector<double> mu, la;  // per local cell
  std::vector<Vec3> xK;
  std::vector<std::pair<int, double>> vavg;  // (local cell, weight)
  std::map<int, std::vector<std::pair<int, double>>> eavg;  // per edge
  double mu_hat = 0.0;
  double h_hat = 0.0;

  RegionKernel(const InteractionRegion& r_, const Mesh& m_,
               const IsotropicField& mat_, const DiscOptions& opt_)
      : r(r_), m(m_), mat(mat_), opt(opt_) {
    D = m.dim;
    C = int(r.cells.size());
    scalar = opt.method == Method::MpfaScalar;
    mu.resize(C);
    la.resize(C);
    xK.resize(C);
    for (int i = 0; i < C; ++i) {
      mu[i] = mat.mu[r.cells[i]];
      la[i] = mat.lambda[r.cells[i]];
      xK[i] = m.cells[r.cells[i]].center;
      mu_hat = std::max(mu_hat, 2.0 * mu[i] + la[i]);
    }
    for (const auto& sf : r.subfaces) {
      h_hat = std::max(h_hat, (sf.xc - xK[sf.lc0]).norm());
      if (sf.lc1 >= 0) h_hat = std::max(h_hat, (sf.xc - xK[sf.lc1]).norm());
    }
    if (!scalar) {
      vavg = weighted(range_all());
      if (D == 3 && opt.method == Method::MpsaW &&
          opt.averaging == Averaging::Edge) {
        for (const auto& sf : r.subfaces)
          for (const auto& p : sf.parts)
            if (p.edge >= 0 && !eavg.count(p.edge)) {
              std::vector<int> locals;
              for (int c : m.edge_cells[p.edge]) {
                int lc = r.local_cell(c);
                if (lc >= 0) locals.push_back(lc);
              }
              eavg.emplace(p.edge, weighted(locals));
            }
      }
    }
  }

  std::vector<int> range_all() const {
    std::vector<int> v(C);
    for (int i = 0; i < C; ++i) v[i] = i;
    return v;
  }

  std::vector<std::pair<int, double>> weighted(
      const std::vector<int>& locals) const {
    std::vector<std::pair<int, double>> w;
    w.reserve(locals.size());
    if (opt.weights == AvgWeights::Uniform) {
      for (int lc : locals) w.emplace_back(lc, 1.0 / double(locals.size()));
      return w;
    }
    double total = 0.0;
    for (int lc : locals) total += r.subvol[lc];
    for (int lc : locals) w.emplace_back(lc, r.subvol[lc] / total);
    return w;
  }

  int gcol(int lc, int i, int j) const { return (lc * D + i) * D + j; }
  int scol(int lc, int j) const { return lc * D + j; }
  int gcols() const { return scalar ? D * C : D * D * C; }
  int vcols() const {
    return scalar ? C + r.n_boundary : D * (C + r.n_boundary);
  }

  // rows += c * m_w * (C_lc : G_lc) . n, with wn = m_w * n
  void add_stress(MatrixXd& A, int row0, int lc, const Vec3& wn,
                  double c) const {
    const double two_mu = 2.0 * mu[lc] * c, lam = la[lc] * c;
    for (int i = 0; i < D; ++i) {
      for (int j = 0; j < D; ++j) A(row0 + i, gcol(lc, i, j)) += two_mu * wn[j];
      for (int k = 0; k < D; ++k) A(row0 + i, gcol(lc, k, k)) += lam * wn[i];
    }
  }

  // rows += c * m_w * (C_lc : G_lc)^T . n
  void add_stress_transpose(MatrixXd& A, int row0, int lc, const Vec3& wn,
                            double c) const {
    const double two_mu = 2.0 * mu[lc] * c, lam = la[lc] * c;
    for (int i = 0; i < D; ++i) {
      for (int j = 0; j < D; ++j) A(row0 + i, gcol(lc, j, i)) += two_mu * wn[j];
      for (int k = 0; k < D; ++k) A(row0 + i, gcol(lc, k, k)) += lam * wn[i];
    }
  }

  // Sub-face parts with their averaging patch: one part spanning the whole
  // sub-face except for 3D edge averaging, which splits it in two.
  struct Part {
    double area;
    const std::vector<std::pair<int, double>>* avg;
  };
  std::vector<Part> parts_of(const RegionSubface& sf) const {
    if (D == 3 && opt.method == Method::MpsaW &&
        opt.averaging == Averaging::Edge) {
      std::vector<Part> ps;
      for (const auto& p : sf.parts)
        if (p.edge >= 0) ps.push_back({p.area, &eavg.at(p.edge)});
      return ps;
    }
    return {{sf.area, &vavg}};
  }

  // Traction coefficients of a sub-face over the gradient unknowns, seen from
  // side 0 (lc0, outward normal) or side 1. D rows, or one in scalar mode.
  MatrixXd traction_coeffs(const RegionSubface& sf, int side) const {
    const int lc = side ? sf.lc1 : sf.lc0;
    const Vec3 n = side ? Vec3(-sf.normal) : sf.normal;
    MatrixXd T = MatrixXd::Zero(scalar ? 1 : D, gcols());
    if (scalar) {
      for (int j = 0; j < D; ++j)
        T(0, scol(lc, j)) = mu[lc] * sf.area * n[j];
      return T;
    }
    const bool strong =
        opt.method == Method::MpsaOSimplex ||
        (sf.lc1 < 0 && sf.bc == BCType::Neumann && !opt.neumann_average_term);
    for (const Part& p : parts_of(sf)) {
      const Vec3 wn = p.area * n;
      add_stress(T, 0, lc, wn, 0.5);
      if (strong) {
        add_stress_transpose(T, 0, lc, wn, 0.5);
      } else {
        for (const auto& [k, w] : *p.avg)
          add_stress_transpose(T, 0, k, wn, 0.5 * w);
      }
    }
    return T;
  }

  LocalSystem assemble() const {
    LocalSystem sys;
    sys.dim = D;
    sys.ncells = C;
    const int per = scalar ? 1 : D;
    const int rows = per * (2 * r.n_interior + r.n_boundary);
    if (rows != gcols())
      throw NumericalError(
          "local system at vertex " + std::to_string(r.vertex) + " is " +
          std::to_string(rows) + "x" + std::to_string(gcols()) +
          "; cells must have exactly " + std::to_string(D) +
          " faces per vertex");
    sys.A.setZero(rows, gcols());
    sys.R.setZero(rows, vcols());
    sys.row_scale.assign(rows, 1.0);
    sys.boundary_offset = scalar ? C : D * C;
    sys.slot_of_subface.assign(r.subfaces.size(), -1);

    int row = 0, ord = 0;
    for (std::size_t si = 0; si < r.subfaces.size(); ++si) {
      const RegionSubface& sf = r.subfaces[si];
      const Vec3 d0 = sf.xc - xK[sf.lc0];
      if (sf.lc1 >= 0) {
        const Vec3 d1 = sf.xc - xK[sf.lc1];
        // stress (flux) balance across the sub-face; patch averages cancel
        if (scalar) {
          for (int j = 0; j < D; ++j) {
            sys.A(row, scol(sf.lc0, j)) += mu[sf.lc0] * sf.area * sf.normal[j];
            sys.A(row, scol(sf.lc1, j)) -= mu[sf.lc1] * sf.area * sf.normal[j];
          }
        } else {
          const Vec3 wn = sf.area * sf.normal;
          add_stress(sys.A, row, sf.lc0, wn, 0.5);
          add_stress(sys.A, row, sf.lc1, wn, -0.5);
          if (opt.method == Method::MpsaOSimplex) {
            add_stress_transpose(sys.A, row, sf.lc0, wn, 0.5);
            add_stress_transpose(sys.A, row, sf.lc1, wn, -0.5);
          }
        }
        for (int i = 0; i < per; ++i)
          sys.row_scale[row + i] = 1.0 / (mu_hat * sf.area);
        row += per;
        // displacement continuity at the continuity point
        for (int i = 0; i < per; ++i) {
          if (scalar) {
            for (int j = 0; j < D; ++j) {
              sys.A(row, scol(sf.lc0, j)) += d0[j];
              sys.A(row, scol(sf.lc1, j)) -= d1[j];
            }
            sys.R(row, sf.lc0) = -1.0;
            sys.R(row, sf.lc1) = 1.0;
          } else {
            for (int j = 0; j < D; ++j) {
              sys.A(row, gcol(sf.lc0, i, j)) += d0[j];
              sys.A(row, gcol(sf.lc1, i, j)) -= d1[j];
            }
            sys.R(row, sf.lc0 * D + i) = -1.0;
            sys.R(row, sf.lc1 * D + i) = 1.0;
          }
          sys.row_scale[row] = 1.0 / h_hat;
          ++row;
        }
      } else {
        sys.slot_of_subface[si] = ord;
        const int slot0 = sys.boundary_offset + ord * per;
        if (sf.bc == BCType::Dirichlet) {
          for (int i = 0; i < per; ++i) {
            if (scalar) {
              for (int j = 0; j < D; ++j) sys.A(row, scol(sf.lc0, j)) += d0[j];
              sys.R(row, sf.lc0) = -1.0;
            } else {
              for (int j = 0; j < D; ++j)
                sys.A(row, gcol(sf.lc0, i, j)) += d0[j];
              sys.R(row, sf.lc0 * D + i) = -1.0;
            }
            sys.R(row, slot0 + i) = 1.0;
            sys.row_scale[row] = 1.0 / h_hat;
            ++row;
          }
        } else {
          sys.A.block(row, 0, per, gcols()) += traction_coeffs(sf, 0);
          for (int i = 0; i < per; ++i) {
            sys.R(row + i, slot0 + i) = 1.0;
            sys.row_scale[row + i] = 1.0 / (mu_hat * sf.area);
          }
          row += per;
        }
        ++ord;
      }
    }
    return sys;
  }
};

}  // namespace mpsaw::detail
