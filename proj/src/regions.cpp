#include <algorithm>

#include "mpsaw/discretize.hpp"
#include "mpsaw/errors.hpp"

namespace mpsaw {

int InteractionRegion::local_cell(int global) const {
  auto it = std::lower_bound(cells.begin(), cells.end(), global);
  if (it == cells.end() || *it != global) return -1;
  return int(it - cells.begin());
}

int InteractionRegion::n_gradient_unknowns(int dim) const {
  return dim * dim * int(cells.size());
}

int InteractionRegion::n_equations(int dim) const {
  return 2 * dim * n_interior + dim * n_boundary;
}

int InteractionRegion::n_displacement_rows(int dim) const {
  int rows = dim * n_interior;
  for (const auto& sf : subfaces)
    if (sf.lc1 < 0 && sf.bc == BCType::Dirichlet) rows += dim;
  return rows;
}

std::vector<InteractionRegion> build_regions(const Mesh& m,
                                             const SubGeometry& sg,
                                             const BoundaryConditions& bc) {
  if (bc.type.size() != m.faces.size())
    throw ConfigError("bc: type table covers " + std::to_string(bc.type.size()) +
                      " faces, mesh has " + std::to_string(m.faces.size()));
  bool need_g = false, need_t = false;
  for (std::size_t f = 0; f < m.faces.size(); ++f) {
    if (!m.boundary(int(f))) continue;
    (bc.type[f] == BCType::Dirichlet ? need_g : need_t) = true;
  }
  if (need_g && !bc.displacement)
    throw ConfigError("bc: Dirichlet faces present but no displacement data");
  if (need_t && !bc.traction)
    throw ConfigError("bc: Neumann faces present but no traction data");

  std::vector<InteractionRegion> regions(m.verts.size());
  for (std::size_t s = 0; s < m.verts.size(); ++s) {
    InteractionRegion& r = regions[s];
    r.vertex = int(s);
    r.cells = m.vertex_cells[s];
    r.subvol.resize(r.cells.size());
    for (std::size_t i = 0; i < r.cells.size(); ++i) {
      const Cell& K = m.cells[r.cells[i]];
      auto it = std::find(K.verts.begin(), K.verts.end(), int(s));
      r.subvol[i] = sg.subcell_volume[r.cells[i]][it - K.verts.begin()];
    }
    r.subfaces.reserve(m.vertex_faces[s].size());
    for (int f : m.vertex_faces[s]) {
      const Face& face = m.faces[f];
      RegionSubface sf;
      sf.face = f;
      auto it = std::find(face.verts.begin(), face.verts.end(), int(s));
      sf.corner = int(it - face.verts.begin());
      sf.lc0 = r.local_cell(face.cells[0]);
      sf.lc1 = face.cells[1] >= 0 ? r.local_cell(face.cells[1]) : -1;
      if (sf.lc0 < 0 || (face.cells[1] >= 0 && sf.lc1 < 0))
        throw NumericalError("region at vertex " + std::to_string(s) +
                             ": face " + std::to_string(f) +
                             " references a cell outside the vertex patch");
      if (face.cells[1] < 0) sf.bc = bc.type[f];
      sf.area = sg.subface_area[f][sf.corner];
      sf.normal = face.normal;
      sf.xc = sg.continuity_point[f][sf.corner];
      sf.centroid = sg.subface_centroid[f][sf.corner];
      if (m.dim == 3) sf.parts = sg.edge_parts[f][sf.corner];
      (sf.lc1 >= 0 ? r.n_interior : r.n_boundary) += 1;
      r.subfaces.push_back(sf);
    }
  }
  return regions;
}

}  // namespace mpsaw
