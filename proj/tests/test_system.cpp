#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "mpsaw/material.hpp"
#include "mpsaw/metrics.hpp"
#include "mpsaw/mms.hpp"
#include "mpsaw/system.hpp"
#include "support.hpp"

using namespace mpsaw;

TEST_CASE("assembled rows reproduce the summed face tractions") {
  // with zero body force, (S u - rhs)_K must equal the oriented traction sum
  // around cell K for *any* cell vector u, not just the solution
  const Mesh m = perturb(build_cartesian(2, 3), 0.25, 9);
  const SubGeometry sg = compute_subgeometry(m, "auto");
  const ManufacturedCase mc = case_2d(1.0, 1.0);
  const IsotropicField mat = uniform_field(m, 1.0, 1.0);
  const BoundaryConditions bc = dirichlet_all(m, mc.u);
  const Discretization disc = discretize_all(m, sg, mat, bc, {});
  const Eigen::VectorXd bvals = boundary_values(m, sg, disc, bc);
  const GlobalSystem sys =
      assemble(m, disc, [](const Vec3&) { return Vec3::Zero(); }, bvals);

  std::mt19937 rng(4);
  std::normal_distribution<double> dist;
  DisplacementField field;
  field.u.resize(m.cells.size());
  Eigen::VectorXd uvec(2 * m.cells.size());
  for (size_t c = 0; c < m.cells.size(); ++c) {
    field.u[c] = Vec3(dist(rng), dist(rng), 0.0);
    uvec[2 * c] = field.u[c][0];
    uvec[2 * c + 1] = field.u[c][1];
  }
  const TractionField t = face_tractions(m, disc, field, bvals);
  const Eigen::VectorXd lhs = sys.S * uvec - sys.rhs;

  double scale = 0.0;
  for (const Vec3& tt : t.total) scale = std::max(scale, tt.norm());
  for (size_t c = 0; c < m.cells.size(); ++c) {
    Vec3 sum = Vec3::Zero();
    for (int f : m.cells[c].faces) {
      const double s = m.faces[f].cells[0] == (int)c ? 1.0 : -1.0;
      sum += s * t.total[f];
    }
    CHECK(std::abs(sum[0] - lhs[2 * c]) < 1e-12 * scale);
    CHECK(std::abs(sum[1] - lhs[2 * c + 1]) < 1e-12 * scale);
  }
}

TEST_CASE("affine displacement fields are reproduced exactly") {
  std::mt19937_64 rng(21);
  for (int dim : {2, 3}) {
    const int n = dim == 2 ? 3 : 2;
    for (bool simplex : {false, true}) {
      Mesh m = simplex ? build_simplex(dim, n) : build_cartesian(dim, n);
      m = perturb(m, 0.25, 13);
      const Eigen::Matrix3d A = testsup::random_gradient(rng, dim);
      const auto [ed, epi] = testsup::patch_residual(
          m, A, Vec3(0.1, -0.2, 0.05), 1.0, 1.0);
      CHECK(ed < 1e-11);
      CHECK(epi < 1e-11);
    }
  }
}

TEST_CASE("solved fields balance momentum cell by cell") {
  const Mesh m = perturb(build_simplex(2, 4), 0.2, 2);
  const ManufacturedCase mc = case_2d(1.0, 1.0);
  const IsotropicField mat = uniform_field(m, 1.0, 1.0);
  const auto out = testsup::solve_case(m, mc, mat);
  const std::vector<Vec3> res =
      momentum_residual(m, out.tractions, mc.body_force);
  double tmax = 0.0;
  for (const Vec3& t : out.tractions.total) tmax = std::max(tmax, t.norm());
  for (const Vec3& r : res) CHECK(r.norm() < 1e-12 * std::max(tmax, 1.0));
  CHECK(out.field.residual < 1e-10);
}

TEST_CASE("discretization is deterministic across thread counts") {
  const Mesh m = perturb(build_cartesian(2, 4), 0.3, 6);
  const SubGeometry sg = compute_subgeometry(m, "auto");
  const ManufacturedCase mc = case_2d(1.0, 1.0);
  const IsotropicField mat = uniform_field(m, 1.0, 1.0);
  const BoundaryConditions bc = dirichlet_all(m, mc.u);

  DiscOptions one, four;
  one.threads = 1;
  four.threads = 4;
  const Discretization d1 = discretize_all(m, sg, mat, bc, one);
  const Discretization d4 = discretize_all(m, sg, mat, bc, four);
  const Eigen::VectorXd bv = boundary_values(m, sg, d1, bc);
  const GlobalSystem s1 = assemble(m, d1, mc.body_force, bv);
  const GlobalSystem s4 = assemble(m, d4, mc.body_force, bv);

  REQUIRE(s1.S.nonZeros() == s4.S.nonZeros());
  CHECK((s1.S - s4.S).norm() == 0.0);  // bitwise identical assembly
  CHECK((s1.rhs - s4.rhs).norm() == 0.0);
  const DisplacementField u1 = solve(s1), u4 = solve(s4);
  for (size_t c = 0; c < m.cells.size(); ++c)
    CHECK((u1.u[c] - u4.u[c]).norm() == 0.0);
}

TEST_CASE("traction boundary sides accept prescribed loads") {
  const ManufacturedCase mc = case_2d(1.0, 1.0);
  auto run = [&](int n) {
    const Mesh m = build_cartesian(2, n);
    const SubGeometry sg = compute_subgeometry(m, "auto");
    const IsotropicField mat = uniform_field(m, 1.0, 1.0);
    const BoundaryConditions bc = mixed_box(
        m, mc.u,
        [&](const Vec3& x, const Vec3& n_) { return Vec3(mc.stress(x) * n_); },
        {0});  // low-x side carries the exact traction, rest pins displacement
    int neumann_faces = 0;
    for (int f = 0; f < (int)m.faces.size(); ++f)
      if (m.boundary(f) && bc.type[f] == BCType::Neumann) ++neumann_faces;
    CHECK(neumann_faces == n);

    const Discretization disc = discretize_all(m, sg, mat, bc, {});
    const Eigen::VectorXd bv = boundary_values(m, sg, disc, bc);
    const DisplacementField field =
        solve(assemble(m, disc, mc.body_force, bv));
    return displacement_error(m, field, mc);
  };
  const double e8 = run(8), e16 = run(16);
  CHECK(e8 < 0.2);
  CHECK(e16 < e8 / 2.8);  // better than first-order decay under refinement
}

TEST_CASE("matrix export writes one triplet per stored entry") {
  const Mesh m = build_cartesian(2, 2);
  const SubGeometry sg = compute_subgeometry(m, "auto");
  const ManufacturedCase mc = case_2d(1.0, 1.0);
  const IsotropicField mat = uniform_field(m, 1.0, 1.0);
  const BoundaryConditions bc = dirichlet_all(m, mc.u);
  const Discretization disc = discretize_all(m, sg, mat, bc, {});
  const Eigen::VectorXd bv = boundary_values(m, sg, disc, bc);
  const GlobalSystem sys = assemble(m, disc, mc.body_force, bv);

  const std::string path = "export_matrix_test.txt";
  export_matrix(sys.S, path);
  std::ifstream in(path);
  REQUIRE(in.good());
  int lines = 0;
  std::string line;
  long row, col;
  double val;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    REQUIRE((ls >> row >> col >> val));
    CHECK(row >= 0);
    CHECK(row < sys.S.rows());
    ++lines;
  }
  CHECK(lines == (int)sys.S.nonZeros());
  std::remove(path.c_str());
}
