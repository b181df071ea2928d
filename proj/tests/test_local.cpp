#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "mpsaw/discretize.hpp"
#include "mpsaw/errors.hpp"
#include "mpsaw/material.hpp"
#include "mpsaw/mms.hpp"
#include "mpsaw/system.hpp"
#include "support.hpp"

using namespace mpsaw;

namespace {

BoundaryConditions zero_dirichlet(const Mesh& m) {
  return dirichlet_all(m, [](const Vec3&) { return Vec3::Zero(); });
}

std::vector<InteractionRegion> regions_of(const Mesh& m,
                                          const SubGeometry& sg) {
  const BoundaryConditions bc = zero_dirichlet(m);
  return build_regions(m, sg, bc);
}

}  // namespace

TEST_CASE("interaction regions have the expected shape") {
  const Mesh m2 = build_cartesian(2, 4);
  const SubGeometry g2 = compute_subgeometry(m2, "auto");
  const auto r2 = regions_of(m2, g2);
  REQUIRE(r2.size() == m2.verts.size());
  int interior = 0, corner = 0;
  for (const auto& r : r2) {
    CHECK(r.n_interior + r.n_boundary == (int)r.subfaces.size());
    CHECK(r.n_equations(2) == r.n_gradient_unknowns(2));
    if (r.n_boundary == 0) {
      ++interior;
      CHECK(r.cells.size() == 4);
      CHECK(r.subfaces.size() == 4);
      CHECK(r.n_gradient_unknowns(2) == 16);
      CHECK(r.n_displacement_rows(2) == 8);
    }
    if (r.cells.size() == 1) {
      ++corner;
      CHECK(r.n_boundary == 2);
      CHECK(r.n_gradient_unknowns(2) == 4);
    }
    double vol = 0.0;
    for (double v : r.subvol) vol += v;
    CHECK(vol > 0.0);
  }
  CHECK(interior == 9);  // (n-1)^2 interior vertices
  CHECK(corner == 4);

  const Mesh m3 = build_cartesian(3, 2);
  const SubGeometry g3 = compute_subgeometry(m3, "auto");
  int interior3 = 0;
  for (const auto& r : regions_of(m3, g3)) {
    if (r.n_boundary > 0) continue;
    ++interior3;
    CHECK(r.cells.size() == 8);
    CHECK(r.subfaces.size() == 12);
    CHECK(r.n_gradient_unknowns(3) == 72);
    CHECK(r.n_displacement_rows(3) == 36);
  }
  CHECK(interior3 == 1);  // only the center vertex of the 2x2x2 grid
}

TEST_CASE("discretization statistics summarize the region shapes") {
  const Mesh m = build_cartesian(3, 2);
  const SubGeometry sg = compute_subgeometry(m, "auto");
  const IsotropicField mat = uniform_field(m, 1.0, 1.0);
  const Discretization disc =
      discretize_all(m, sg, mat, zero_dirichlet(m), {});
  CHECK(disc.stats.interior_regions == 1);
  CHECK(disc.stats.boundary_regions == 26);
  CHECK(disc.stats.interior_disp_rows_min == 36);
  CHECK(disc.stats.interior_disp_rows_max == 36);
  CHECK(disc.stats.interior_disp_rows_mean == doctest::Approx(36.0));
  CHECK(disc.stats.max_system_rows == 72);
  CHECK(disc.min_rcond > 0.0);

  const Mesh mt = build_simplex(3, 2);
  const SubGeometry sgt = compute_subgeometry(mt, "auto");
  const Discretization dt =
      discretize_all(mt, sgt, uniform_field(mt, 1.0, 1.0), zero_dirichlet(mt),
                     {});
  CHECK(dt.stats.interior_regions + dt.stats.boundary_regions ==
        (long)mt.verts.size());
  CHECK(dt.stats.max_system_rows > 0);
}

// With lambda = 0 the vector method must fall apart into independent copies
// of the scalar diffusion discretization: identical local rows per component
// and no cross-component coupling anywhere in the local solve.
TEST_CASE("zero second lame parameter decouples into scalar problems") {
  const Mesh m = perturb(build_cartesian(2, 3), 0.25, 19);
  const SubGeometry sg = compute_subgeometry(m, "auto");
  const IsotropicField mat = uniform_field(m, 1.3, 0.0);
  const int D = m.dim;

  DiscOptions wopt, sopt;
  wopt.method = Method::MpsaW;
  sopt.method = Method::MpfaScalar;

  for (const auto& r : regions_of(m, sg)) {
    const int C = int(r.cells.size());
    const LocalSystem w = assemble_local(r, m, mat, wopt);
    const LocalSystem s = assemble_local(r, m, mat, sopt);
    REQUIRE(w.A.rows() == D * s.A.rows());
    REQUIRE(w.boundary_offset == D * s.boundary_offset);

    const double ascale = s.A.cwiseAbs().maxCoeff();
    auto gcol = [D](int lc, int i, int j) { return (lc * D + i) * D + j; };

    int wrow = 0, srow = 0;
    for (const auto& sf : r.subfaces) {
      const int nrows = sf.lc1 >= 0 ? 2 : 1;  // stress+continuity or boundary
      for (int b = 0; b < nrows; ++b) {
        for (int i = 0; i < D; ++i) {
          const int wr = wrow + b * D + i, sr = srow + b;
          CHECK(w.row_scale[wr] == doctest::Approx(s.row_scale[sr]));
          for (int lc = 0; lc < C; ++lc)
            for (int j = 0; j < D; ++j)
              for (int ii = 0; ii < D; ++ii) {
                const double want = ii == i ? s.A(sr, lc * D + j) : 0.0;
                CHECK(std::abs(w.A(wr, gcol(lc, ii, j)) - want) <
                      1e-14 * ascale);
              }
          for (int lc = 0; lc < C; ++lc)
            for (int ii = 0; ii < D; ++ii) {
              const double want = ii == i ? s.R(sr, lc) : 0.0;
              CHECK(std::abs(w.R(wr, lc * D + ii) - want) < 1e-14);
            }
          for (int ord = 0; ord < r.n_boundary; ++ord)
            for (int ii = 0; ii < D; ++ii) {
              const double want = ii == i ? s.R(sr, C + ord) : 0.0;
              CHECK(std::abs(w.R(wr, D * C + ord * D + ii) - want) < 1e-14);
            }
        }
      }
      wrow += nrows * D;
      srow += nrows;
    }

    // the gradient response inherits the decoupling, one solve per component
    const LocalSolve gw = solve_local(w, r.vertex);
    const LocalSolve gs = solve_local(s, r.vertex);
    const double gscale = gs.G.cwiseAbs().maxCoeff();
    for (int lc = 0; lc < C; ++lc)
      for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j)
          for (int c = 0; c < C + r.n_boundary; ++c)
            for (int ii = 0; ii < D; ++ii) {
              const double got = gw.G(gcol(lc, i, j), c * D + ii);
              const double want = ii == i ? gs.G(lc * D + j, c) : 0.0;
              CHECK(std::abs(got - want) < 1e-10 * gscale);
            }
  }
}

TEST_CASE("face stencils annihilate rigid motions") {
  // constant plus skew-gradient displacements carry no stress, so every
  // sub-face traction stencil must evaluate to zero on them
  for (int dim : {2, 3}) {
    Mesh m = dim == 2 ? build_simplex(2, 3) : build_cartesian(3, 2);
    m = perturb(m, 0.2, 23);
    const SubGeometry sg = compute_subgeometry(m, "auto");
    const IsotropicField mat = uniform_field(m, 1.0, 2.0);
    const BoundaryConditions bc = zero_dirichlet(m);
    const Discretization disc = discretize_all(m, sg, mat, bc, {});

    // continuity point of every boundary-data slot
    std::vector<Vec3> slot_point(disc.slots.count, Vec3::Zero());
    for (int f = 0; f < (int)m.faces.size(); ++f) {
      if (disc.slots.base[f] < 0) continue;
      for (int k = 0; k < (int)m.faces[f].verts.size(); ++k)
        slot_point[disc.slots.base[f] + k] = sg.continuity_point[f][k];
    }

    Eigen::Matrix3d W = Eigen::Matrix3d::Zero();
    W(0, 1) = 0.7;
    W(1, 0) = -0.7;
    if (dim == 3) {
      W(0, 2) = -0.3;
      W(2, 0) = 0.3;
      W(1, 2) = 0.2;
      W(2, 1) = -0.2;
    }
    const Vec3 shift(0.4, -0.9, dim == 3 ? 0.6 : 0.0);
    auto rigid = [&](const Vec3& x) { return Vec3(shift + W * x); };

    for (int f = 0; f < (int)m.faces.size(); ++f)
      for (const SubfaceStencil& st : disc.stencils[f]) {
        Vec3 T = Vec3::Zero();
        double scale = 1e-300;
        for (size_t k = 0; k < st.cells.size(); ++k) {
          T += st.cell_blocks[k] * rigid(m.cells[st.cells[k]].center);
          scale = std::max(scale, st.cell_blocks[k].norm());
        }
        for (size_t k = 0; k < st.slots.size(); ++k) {
          T += st.slot_blocks[k] * rigid(slot_point[st.slots[k]]);
          scale = std::max(scale, st.slot_blocks[k].norm());
        }
        CHECK(T.norm() < 1e-12 * scale);
      }
  }
}

TEST_CASE("local gradient reconstruction is exact on affine fields") {
  std::mt19937_64 rng(3);
  for (int dim : {2, 3}) {
    Mesh m = dim == 2 ? build_cartesian(2, 3) : build_simplex(3, 2);
    m = perturb(m, 0.2, 31);
    const SubGeometry sg = compute_subgeometry(m, "auto");
    const IsotropicField mat = uniform_field(m, 2.0, 1.0);
    const Eigen::Matrix3d A = testsup::random_gradient(rng, dim);
    const Vec3 b(0.2, -0.4, 0.1);

    int checked = 0;
    for (const auto& r : regions_of(m, sg)) {
      if (checked >= 12) break;  // a sample is enough, solves are dense
      ++checked;
      const int C = int(r.cells.size());
      Eigen::VectorXd vals(dim * (C + r.n_boundary));
      for (int lc = 0; lc < C; ++lc) {
        const Vec3 u = A * m.cells[r.cells[lc]].center + b;
        for (int i = 0; i < dim; ++i) vals[lc * dim + i] = u[i];
      }
      const LocalSystem sys = assemble_local(r, m, mat, {});
      int ord = 0;
      for (size_t si = 0; si < r.subfaces.size(); ++si) {
        if (sys.slot_of_subface[si] < 0) continue;
        const Vec3 u = A * r.subfaces[si].xc + b;
        for (int i = 0; i < dim; ++i)
          vals[dim * C + sys.slot_of_subface[si] * dim + i] = u[i];
        ++ord;
      }
      REQUIRE(ord == r.n_boundary);
      const auto G = testsup::region_gradients(r, m, mat, {}, vals);
      for (const auto& g : G) CHECK((g - A).norm() < 1e-11);
    }
  }
}

TEST_CASE("weighted stress averages are symmetric for any field") {
  std::mt19937_64 rng(77);
  for (int dim : {2, 3}) {
    for (bool simplex : {false, true}) {
      Mesh m = simplex ? build_simplex(dim, 2) : build_cartesian(dim, 2);
      m = perturb(m, 0.2, 41);
      const SubGeometry sg = compute_subgeometry(m, "auto");
      const IsotropicField mat = from_indicator(m, 10.0, 1.5);
      for (AvgWeights wmode : {AvgWeights::Volume, AvgWeights::Uniform}) {
        DiscOptions opt;
        opt.weights = wmode;
        int checked = 0;
        for (const auto& r : regions_of(m, sg)) {
          if (r.cells.size() < 2 || checked >= 8) continue;
          ++checked;
          CHECK(testsup::weak_symmetry_residual(r, m, mat, opt, rng) < 1e-12);
        }
        CHECK(checked > 0);
      }
    }
  }
}

TEST_CASE("coercivity audit matches a dense reimplementation") {
  for (int dim : {2, 3}) {
    Mesh m = dim == 2 ? build_cartesian(2, 3) : build_cartesian(3, 2);
    m = perturb(m, 0.15, 53);
    const SubGeometry sg = compute_subgeometry(m, "auto");
    for (double alpha : {1.0, 2.0}) {
      const IsotropicField mat = uniform_field(m, 1.0, alpha);
      DiscOptions opt;
      opt.audit = true;
      for (const auto& r : regions_of(m, sg)) {
        const CoercivityEntry e = coercivity_audit(r, m, sg, mat, opt);
        CHECK(e.vertex == r.vertex);
        if (r.cells.size() < 2) {
          CHECK(e.skipped);
          continue;
        }
        REQUIRE(!e.skipped);
        REQUIRE(!e.degenerate);
        const double oracle = testsup::oracle_theta(r, m, mat, opt);
        CHECK(std::abs(e.theta - oracle) <
              1e-9 * std::max(1.0, std::abs(e.theta)));
      }
    }
  }
}

TEST_CASE("corner cells with two traction sides are reported singular") {
  // a one-cell corner region whose sub-faces are all Neumann leaves the
  // rotational part of the gradient unconstrained: the traction rows only
  // see the symmetric stress, whichever transpose convention is active
  const Mesh m = build_cartesian(2, 4);
  const SubGeometry sg = compute_subgeometry(m, "auto");
  const IsotropicField mat = uniform_field(m, 1.0, 1.0);
  const ManufacturedCase mc = case_2d(1.0, 1.0);
  const auto traction = [&](const Vec3& x, const Vec3& n) {
    return Vec3(mc.stress(x) * n);
  };
  const BoundaryConditions adjacent =
      mixed_box(m, mc.u, traction, {0, 2});  // both faces of the (0,0) cell

  for (bool average_term : {true, false}) {
    DiscOptions opt;
    opt.neumann_average_term = average_term;
    try {
      discretize_all(m, sg, mat, adjacent, opt);
      CHECK(false);
    } catch (const NumericalError& e) {
      CHECK(std::string(e.what()).find("singular") != std::string::npos);
    }
  }

  // opposite traction sides never share a corner cell and stay solvable
  const Mesh m8 = build_cartesian(2, 8);
  const SubGeometry sg8 = compute_subgeometry(m8, "auto");
  const IsotropicField mat8 = uniform_field(m8, 1.0, 1.0);
  const BoundaryConditions opposite = mixed_box(m8, mc.u, traction, {0, 1});
  const Discretization disc = discretize_all(m8, sg8, mat8, opposite, {});
  const Eigen::VectorXd bv = boundary_values(m8, sg8, disc, opposite);
  const DisplacementField field =
      solve(assemble(m8, disc, mc.body_force, bv));
  CHECK(displacement_error(m8, field, mc) < 0.3);
}
