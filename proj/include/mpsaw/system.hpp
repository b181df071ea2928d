#pragma once
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "mpsaw/discretize.hpp"

namespace mpsaw {

using BodyForce = std::function<Vec3(const Vec3&)>;

// Cell-major, component-minor unknown ordering: cell K owns rows/columns
// [K*D, (K+1)*D).
struct GlobalSystem {
  int dim = 2;
  Eigen::SparseMatrix<double> S;
  Eigen::VectorXd rhs;
  bool any_dirichlet = false;
};

struct DisplacementField {
  std::vector<Vec3> u;
  double residual = 0.0;  // relative ||S u - rhs|| from the last solve
};

struct TractionField {
  std::vector<Vec3> total;  // per face, oriented out of faces[f].cells[0]
};

// Prescribed boundary data stacked per sub-face slot: the displacement at the
// continuity point (Dirichlet) or the sub-face-integrated traction (Neumann).
Eigen::VectorXd boundary_values(const Mesh& m, const SubGeometry& sg,
                                const Discretization& disc,
                                const BoundaryConditions& bc);

// Force balance per cell: the sub-face traction stencils summed over each
// cell's faces, body force integrated by midpoint rule. Boundary data moves
// to the right-hand side.
GlobalSystem assemble(const Mesh& m, const Discretization& disc,
                      const BodyForce& f, const Eigen::VectorXd& bvals);

DisplacementField solve(const GlobalSystem& sys);

TractionField face_tractions(const Mesh& m, const Discretization& disc,
                             const DisplacementField& field,
                             const Eigen::VectorXd& bvals);

// Residual of the balance law per cell: sum of outward face tractions plus
// the integrated body force.
std::vector<Vec3> momentum_residual(const Mesh& m, const TractionField& t,
                                    const BodyForce& f);

void export_matrix(const Eigen::SparseMatrix<double>& S,
                   const std::string& path);

}  // namespace mpsaw
