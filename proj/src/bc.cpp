#include "mpsaw/bc.hpp"

#include <cmath>

#include "mpsaw/errors.hpp"

namespace mpsaw {

bool BoundaryConditions::any_dirichlet(const Mesh& m) const {
  for (std::size_t f = 0; f < m.faces.size(); ++f)
    if (m.boundary(int(f)) && type[f] == BCType::Dirichlet) return true;
  return false;
}

bool BoundaryConditions::any_neumann(const Mesh& m) const {
  for (std::size_t f = 0; f < m.faces.size(); ++f)
    if (m.boundary(int(f)) && type[f] == BCType::Neumann) return true;
  return false;
}

BoundaryConditions dirichlet_all(const Mesh& m, DisplacementFn g) {
  BoundaryConditions bc;
  bc.type.assign(m.faces.size(), BCType::Dirichlet);
  bc.displacement = std::move(g);
  return bc;
}

BoundaryConditions mixed_box(const Mesh& m, DisplacementFn g, TractionFn t,
                             const std::vector<int>& neumann_sides) {
  BoundaryConditions bc = dirichlet_all(m, std::move(g));
  bc.traction = std::move(t);
  const double tol = 1e-9 * (m.box_hi - m.box_lo).norm();
  for (int side : neumann_sides) {
    if (side < 0 || side >= 2 * m.dim)
      throw ConfigError("bc: side index " + std::to_string(side) +
                        " out of range for dimension " +
                        std::to_string(m.dim));
    const int axis = side / 2;
    const double plane = (side % 2) ? m.box_hi[axis] : m.box_lo[axis];
    for (std::size_t f = 0; f < m.faces.size(); ++f) {
      if (!m.boundary(int(f))) continue;
      if (std::abs(m.faces[f].center[axis] - plane) < tol)
        bc.type[f] = BCType::Neumann;
    }
  }
  return bc;
}

}  // namespace mpsaw
