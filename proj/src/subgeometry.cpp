#include <cmath>

#include "mpsaw/errors.hpp"
#include "mpsaw/mesh.hpp"

namespace mpsaw {

namespace {

double tet_volume(const Vec3& p0, const Vec3& p1, const Vec3& p2,
                  const Vec3& p3) {
  return (p1 - p0).cross(p2 - p0).dot(p3 - p0) / 6.0;
}

double tri_area2(const Vec3& p0, const Vec3& p1, const Vec3& p2) {
  const Vec3 d1 = p1 - p0, d2 = p2 - p0;
  return 0.5 * (d1.x() * d2.y() - d1.y() * d2.x());
}

}  // namespace

double SubGeometry::cell_part_sum(int c) const {
  double s = 0.0;
  for (double v : subcell_volume[c]) s += v;
  return s;
}

double SubGeometry::face_part_sum(int f) const {
  double s = 0.0;
  for (double v : subface_area[f]) s += v;
  return s;
}

double auto_eta(const Mesh& m) { return m.all_simplex() ? 1.0 / 3.0 : 0.0; }

SubGeometry compute_subgeometry(const Mesh& m, const std::string& eta) {
  if (eta == "auto") return compute_subgeometry(m, auto_eta(m));
  try {
    size_t pos = 0;
    const double v = std::stod(eta, &pos);
    if (pos != eta.size()) throw std::invalid_argument(eta);
    return compute_subgeometry(m, v);
  } catch (const std::invalid_argument&) {
    throw ConfigError("eta must be a number in [0,1) or 'auto', got '" + eta +
                      "'");
  }
}

SubGeometry compute_subgeometry(const Mesh& m, double eta) {
  if (!(eta >= 0.0 && eta < 1.0))
    throw ConfigError("eta must lie in [0,1), got " + std::to_string(eta));

  SubGeometry g;
  g.eta = eta;
  const int nf = static_cast<int>(m.faces.size());
  const int nc = static_cast<int>(m.cells.size());
  g.subface_area.resize(nf);
  g.continuity_point.resize(nf);
  g.subface_centroid.resize(nf);
  if (m.dim == 3) g.edge_parts.resize(nf);
  g.subcell_volume.resize(nc);

  // Face split. In 3D each corner quadrilateral (corner, next edge midpoint,
  // face center, previous edge midpoint) is cut along the corner-to-center
  // diagonal into the two edge parts; areas are projections onto the face
  // normal so that corner parts sum to the face area even when the fan is
  // not planar.
  for (int fid = 0; fid < nf; ++fid) {
    const Face& f = m.faces[fid];
    const int k = static_cast<int>(f.verts.size());
    g.subface_area[fid].resize(k);
    g.continuity_point[fid].resize(k);
    g.subface_centroid[fid].resize(k);
    if (m.dim == 3) g.edge_parts[fid].resize(k);
    for (int i = 0; i < k; ++i) {
      const Vec3 xs = m.verts[f.verts[i]];
      g.continuity_point[fid][i] = eta * xs + (1.0 - eta) * f.center;
      if (m.dim == 2) {
        const double a = (f.center - xs).norm();
        if (a <= 0.0)
          throw NumericalError("degenerate mesh: empty sub-face on face " +
                               std::to_string(fid));
        g.subface_area[fid][i] = a;
        g.subface_centroid[fid][i] = 0.5 * (xs + f.center);
      } else {
        const int enext = f.edges[i], eprev = f.edges[(i + k - 1) % k];
        const Vec3 mnext = 0.5 * (xs + m.verts[f.verts[(i + 1) % k]]);
        const Vec3 mprev = 0.5 * (xs + m.verts[f.verts[(i + k - 1) % k]]);
        const double a_next =
            0.5 * (mnext - xs).cross(f.center - xs).dot(f.normal);
        const double a_prev =
            0.5 * (f.center - xs).cross(mprev - xs).dot(f.normal);
        if (a_next <= 0.0 || a_prev <= 0.0)
          throw NumericalError(
              "degenerate mesh: nonpositive sub-face part on face " +
              std::to_string(fid) + " at vertex " +
              std::to_string(f.verts[i]));
        g.edge_parts[fid][i][0] = EdgePart{enext, a_next};
        g.edge_parts[fid][i][1] = EdgePart{eprev, a_prev};
        g.subface_area[fid][i] = a_next + a_prev;
        const Vec3 c_next = (xs + mnext + f.center) / 3.0;
        const Vec3 c_prev = (xs + f.center + mprev) / 3.0;
        g.subface_centroid[fid][i] =
            (a_next * c_next + a_prev * c_prev) / (a_next + a_prev);
      }
    }
  }

  // Corner volumes: the same face fans joined to the cell centroid, grouped
  // by the corner vertex. Summed over the corners of a cell these are
  // exactly the simplices that define the cell volume.
  for (int cid = 0; cid < nc; ++cid) {
    const Cell& cell = m.cells[cid];
    const int nv = static_cast<int>(cell.verts.size());
    g.subcell_volume[cid].assign(nv, 0.0);
    auto slot = [&](int vertex) {
      for (int i = 0; i < nv; ++i)
        if (cell.verts[i] == vertex) return i;
      throw NumericalError("internal: face vertex not on cell");
    };
    for (int fid : cell.faces) {
      const Face& f = m.faces[fid];
      const double sign = (f.cells[0] == cid) ? 1.0 : -1.0;
      const int k = static_cast<int>(f.verts.size());
      for (int i = 0; i < k; ++i) {
        const Vec3 xs = m.verts[f.verts[i]];
        double w;
        if (m.dim == 2) {
          // verts[0] precedes the face midpoint in the outward cycle of
          // cells[0], verts[1] follows it.
          w = sign * (i == 0 ? tri_area2(cell.center, xs, f.center)
                             : tri_area2(cell.center, f.center, xs));
        } else {
          const Vec3 mnext = 0.5 * (xs + m.verts[f.verts[(i + 1) % k]]);
          const Vec3 mprev = 0.5 * (xs + m.verts[f.verts[(i + k - 1) % k]]);
          w = sign * (tet_volume(cell.center, xs, mnext, f.center) +
                      tet_volume(cell.center, xs, f.center, mprev));
        }
        g.subcell_volume[cid][slot(f.verts[i])] += w;
      }
    }
    for (int i = 0; i < nv; ++i)
      if (g.subcell_volume[cid][i] <= 0.0)
        throw NumericalError(
            "degenerate mesh: nonpositive corner volume in cell " +
            std::to_string(cid) + " at vertex " +
            std::to_string(cell.verts[i]));
  }
  return g;
}

}  // namespace mpsaw
