#pragma once
#include <functional>
#include <vector>

#include "mpsaw/mesh.hpp"

namespace mpsaw {

enum class BCType { Dirichlet, Neumann };

// Boundary data per boundary face: Dirichlet faces prescribe displacement
// g(x) at sub-face continuity points; Neumann faces prescribe the traction
// density t(x, n) (force per area, n the outward unit normal) integrated by
// midpoint rule over each sub-face.
struct BoundaryConditions {
  std::vector<BCType> type;  // sized like mesh.faces, interior entries unused
  std::function<Vec3(const Vec3&)> displacement;
  std::function<Vec3(const Vec3&, const Vec3&)> traction;

  bool any_dirichlet(const Mesh& m) const;
  bool any_neumann(const Mesh& m) const;
};

using DisplacementFn = std::function<Vec3(const Vec3&)>;
using TractionFn = std::function<Vec3(const Vec3&, const Vec3&)>;

BoundaryConditions dirichlet_all(const Mesh& m, DisplacementFn g);

// Sides are encoded axis*2 + (0 = low box plane, 1 = high) and switched to
// Neumann; everything else stays Dirichlet. Boundary vertices never move
// under perturbation, so box-plane membership of the face center is exact.
BoundaryConditions mixed_box(const Mesh& m, DisplacementFn g, TractionFn t,
                             const std::vector<int>& neumann_sides);

}  // namespace mpsaw
