#include "mpsaw/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "mpsaw/errors.hpp"

namespace mpsaw {

namespace {

// Face templates, indices into the cell's vertex list. Orientation is fixed
// afterwards from the geometry, so only the vertex sets matter here.
const std::vector<std::vector<int>> kTriFaces = {{0, 1}, {1, 2}, {2, 0}};
const std::vector<std::vector<int>> kQuadFaces = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
const std::vector<std::vector<int>> kTetFaces = {
    {1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}};
// VTK hexahedron: 0-3 bottom counterclockwise, 4-7 on top above them.
const std::vector<std::vector<int>> kHexFaces = {
    {0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4},
    {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7}};

const std::vector<std::vector<int>>& face_template(int dim, int nverts) {
  if (dim == 2) {
    if (nverts == 3) return kTriFaces;
    if (nverts == 4) return kQuadFaces;
  } else {
    if (nverts == 4) return kTetFaces;
    if (nverts == 8) return kHexFaces;
  }
  throw IoError("unsupported cell with " + std::to_string(nverts) +
                " vertices in " + std::to_string(dim) + "D");
}

Vec3 perp2(const Vec3& d) { return Vec3(d.y(), -d.x(), 0.0); }

double tet_volume(const Vec3& p0, const Vec3& p1, const Vec3& p2,
                  const Vec3& p3) {
  return (p1 - p0).cross(p2 - p0).dot(p3 - p0) / 6.0;
}

double tri_area2(const Vec3& p0, const Vec3& p1, const Vec3& p2) {
  const Vec3 d1 = p1 - p0, d2 = p2 - p0;
  return 0.5 * (d1.x() * d2.y() - d1.y() * d2.x());
}

Vec3 vertex_mean(const Mesh& m, const std::vector<int>& ids) {
  Vec3 s = Vec3::Zero();
  for (int v : ids) s += m.verts[v];
  return s / static_cast<double>(ids.size());
}

}  // namespace

bool Mesh::all_simplex() const {
  for (const auto& c : cells)
    if (static_cast<int>(c.verts.size()) != dim + 1) return false;
  return true;
}

int Mesh::n_boundary_faces() const {
  int n = 0;
  for (const auto& f : faces) n += (f.cells[1] < 0);
  return n;
}

double Mesh::max_cell_diameter() const {
  double h = 0.0;
  for (const auto& c : cells)
    for (size_t i = 0; i < c.verts.size(); ++i)
      for (size_t j = i + 1; j < c.verts.size(); ++j)
        h = std::max(h, (verts[c.verts[i]] - verts[c.verts[j]]).norm());
  return h;
}

namespace detail {

void derive_faces(Mesh& m) {
  m.faces.clear();
  std::map<std::vector<int>, int> by_key;
  for (int c = 0; c < static_cast<int>(m.cells.size()); ++c) {
    auto& cell = m.cells[c];
    cell.faces.clear();
    for (const auto& tmpl : face_template(m.dim, cell.verts.size())) {
      std::vector<int> fv(tmpl.size());
      for (size_t i = 0; i < tmpl.size(); ++i) fv[i] = cell.verts[tmpl[i]];
      std::vector<int> key = fv;
      std::sort(key.begin(), key.end());
      auto it = by_key.find(key);
      if (it == by_key.end()) {
        Face f;
        f.verts = fv;
        f.cells[0] = c;
        by_key.emplace(std::move(key), static_cast<int>(m.faces.size()));
        cell.faces.push_back(static_cast<int>(m.faces.size()));
        m.faces.push_back(std::move(f));
      } else {
        Face& f = m.faces[it->second];
        if (f.cells[1] >= 0)
          throw IoError("face shared by more than two cells");
        f.cells[1] = c;
        cell.faces.push_back(it->second);
      }
    }
  }
}

void derive_edges(Mesh& m) {
  m.edges.clear();
  if (m.dim != 3) return;
  std::map<std::pair<int, int>, int> by_key;
  for (auto& f : m.faces) {
    const int k = static_cast<int>(f.verts.size());
    f.edges.resize(k);
    for (int i = 0; i < k; ++i) {
      int a = f.verts[i], b = f.verts[(i + 1) % k];
      auto key = std::minmax(a, b);
      auto it = by_key.find(key);
      if (it == by_key.end()) {
        by_key.emplace(key, static_cast<int>(m.edges.size()));
        f.edges[i] = static_cast<int>(m.edges.size());
        m.edges.push_back(Edge{key.first, key.second});
      } else {
        f.edges[i] = it->second;
      }
    }
  }
}

void derive_adjacency(Mesh& m) {
  const int nv = static_cast<int>(m.verts.size());
  m.vertex_cells.assign(nv, {});
  m.vertex_faces.assign(nv, {});
  m.boundary_vertex.assign(nv, 0);
  for (int c = 0; c < static_cast<int>(m.cells.size()); ++c)
    for (int v : m.cells[c].verts) m.vertex_cells[v].push_back(c);
  for (int f = 0; f < static_cast<int>(m.faces.size()); ++f) {
    for (int v : m.faces[f].verts) {
      m.vertex_faces[v].push_back(f);
      if (m.faces[f].cells[1] < 0) m.boundary_vertex[v] = 1;
    }
  }
  for (auto& l : m.vertex_cells) std::sort(l.begin(), l.end());
  for (auto& l : m.vertex_faces) std::sort(l.begin(), l.end());
  m.edge_cells.assign(m.edges.size(), {});
  if (m.dim == 3) {
    // Every edge of a face is an edge of both adjacent cells.
    for (const auto& f : m.faces)
      for (int e : f.edges)
        for (int c : f.cells)
          if (c >= 0) m.edge_cells[e].push_back(c);
    for (auto& l : m.edge_cells) {
      std::sort(l.begin(), l.end());
      l.erase(std::unique(l.begin(), l.end()), l.end());
    }
  }
}

}  // namespace detail

void compute_geometry(Mesh& m) {
  // Faces first: the area vector (sum of fan-triangle cross products) only
  // depends on the boundary polygon, so the face area |A| and the unit
  // normal A/|A| stay consistent with the sub-face partition even when a
  // perturbed hexahedron face is not planar.
  for (auto& f : m.faces) {
    const Vec3 cell_ref = vertex_mean(m, m.cells[f.cells[0]].verts);
    if (m.dim == 2) {
      const Vec3 a = m.verts[f.verts[0]], b = m.verts[f.verts[1]];
      Vec3 n = perp2(b - a);
      const double len = n.norm();
      if (len <= 0.0) throw NumericalError("degenerate mesh: zero-length face");
      f.center = 0.5 * (a + b);
      if (n.dot(f.center - cell_ref) < 0.0) {
        std::swap(f.verts[0], f.verts[1]);
        n = -n;
      }
      f.normal = n / len;
      f.area = len;
    } else {
      const Vec3 xb = vertex_mean(m, f.verts);
      const int k = static_cast<int>(f.verts.size());
      Vec3 area_vec = Vec3::Zero();
      if ((xb - cell_ref).dot([&] {
            Vec3 av = Vec3::Zero();
            for (int i = 0; i < k; ++i)
              av += 0.5 * (m.verts[f.verts[i]] - xb)
                              .cross(m.verts[f.verts[(i + 1) % k]] - xb);
            return av;
          }()) < 0.0)
        std::reverse(f.verts.begin(), f.verts.end());
      Vec3 centroid = Vec3::Zero();
      double scalar_area = 0.0;
      for (int i = 0; i < k; ++i) {
        const Vec3 vi = m.verts[f.verts[i]], vj = m.verts[f.verts[(i + 1) % k]];
        const Vec3 a = 0.5 * (vi - xb).cross(vj - xb);
        area_vec += a;
        const double w = a.norm();
        scalar_area += w;
        centroid += w * (xb + vi + vj) / 3.0;
      }
      const double area = area_vec.norm();
      if (area <= 0.0 || scalar_area <= 0.0)
        throw NumericalError("degenerate mesh: zero-area face");
      f.normal = area_vec / area;
      f.area = area;
      f.center = centroid / scalar_area;
    }
  }
  // Cell volume and centroid from signed simplices fanned about the face
  // centers; this is the same decomposition the sub-geometry uses, so the
  // per-corner volumes partition the cell exactly.
  for (auto& cell : m.cells) {
    const Vec3 ref = vertex_mean(m, cell.verts);
    double vol = 0.0;
    Vec3 cen = Vec3::Zero();
    for (int fid : cell.faces) {
      const Face& f = m.faces[fid];
      const double sign = (f.cells[0] == (&cell - m.cells.data())) ? 1.0 : -1.0;
      const int k = static_cast<int>(f.verts.size());
      if (m.dim == 2) {
        const Vec3 a = m.verts[f.verts[0]], b = m.verts[f.verts[1]];
        const double w = sign * tri_area2(ref, a, b);
        vol += w;
        cen += w * (ref + a + b) / 3.0;
      } else {
        for (int i = 0; i < k; ++i) {
          const Vec3 vi = m.verts[f.verts[i]],
                     vj = m.verts[f.verts[(i + 1) % k]];
          const double w = sign * tet_volume(ref, f.center, vi, vj);
          vol += w;
          cen += w * (ref + f.center + vi + vj) / 4.0;
        }
      }
    }
    if (vol <= 0.0) throw NumericalError("degenerate mesh: nonpositive cell volume");
    cell.volume = vol;
    cell.center = cen / vol;
  }
}

namespace {

void finalize(Mesh& m) {
  detail::derive_faces(m);
  detail::derive_edges(m);
  detail::derive_adjacency(m);
  compute_geometry(m);
}

int grid_vert(int n, int i, int j, int k) {
  return i + (n + 1) * (j + (n + 1) * k);
}

void make_grid_vertices(Mesh& m, int n, const Vec3& lo, const Vec3& hi) {
  const int nk = (m.dim == 3) ? n : 0;
  for (int k = 0; k <= nk; ++k)
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i) {
        Vec3 p(lo.x() + (hi.x() - lo.x()) * i / n,
               lo.y() + (hi.y() - lo.y()) * j / n,
               m.dim == 3 ? lo.z() + (hi.z() - lo.z()) * k / n : 0.0);
        m.verts.push_back(p);
      }
  m.box_lo = lo;
  m.box_hi = hi;
  if (m.dim == 2) m.box_lo.z() = m.box_hi.z() = 0.0;
}

void check_grid_args(int dim, int n, const Vec3& lo, const Vec3& hi) {
  if (dim != 2 && dim != 3)
    throw ConfigError("dimension must be 2 or 3, got " + std::to_string(dim));
  if (n < 1) throw ConfigError("cells per axis must be >= 1, got " + std::to_string(n));
  for (int d = 0; d < dim; ++d)
    if (!(hi[d] > lo[d])) throw ConfigError("domain box is empty or inverted");
}

}  // namespace

Mesh build_cartesian(int dim, int n, const Vec3& lo, const Vec3& hi) {
  check_grid_args(dim, n, lo, hi);
  Mesh m;
  m.dim = dim;
  make_grid_vertices(m, n, lo, hi);
  if (dim == 2) {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        Cell c;
        c.verts = {grid_vert(n, i, j, 0), grid_vert(n, i + 1, j, 0),
                   grid_vert(n, i + 1, j + 1, 0), grid_vert(n, i, j + 1, 0)};
        m.cells.push_back(std::move(c));
      }
  } else {
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          Cell c;
          c.verts = {grid_vert(n, i, j, k),         grid_vert(n, i + 1, j, k),
                     grid_vert(n, i + 1, j + 1, k), grid_vert(n, i, j + 1, k),
                     grid_vert(n, i, j, k + 1),     grid_vert(n, i + 1, j, k + 1),
                     grid_vert(n, i + 1, j + 1, k + 1),
                     grid_vert(n, i, j + 1, k + 1)};
          m.cells.push_back(std::move(c));
        }
  }
  finalize(m);
  return m;
}

Mesh build_cartesian(int dim, int n) {
  return build_cartesian(dim, n, Vec3::Zero(), Vec3::Ones());
}

Mesh build_simplex(int dim, int n, const Vec3& lo, const Vec3& hi) {
  check_grid_args(dim, n, lo, hi);
  Mesh m;
  m.dim = dim;
  make_grid_vertices(m, n, lo, hi);
  if (dim == 2) {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const int v00 = grid_vert(n, i, j, 0), v10 = grid_vert(n, i + 1, j, 0);
        const int v11 = grid_vert(n, i + 1, j + 1, 0),
                  v01 = grid_vert(n, i, j + 1, 0);
        Cell a, b;
        a.verts = {v00, v10, v11};
        b.verts = {v00, v11, v01};
        m.cells.push_back(std::move(a));
        m.cells.push_back(std::move(b));
      }
  } else {
    // Kuhn triangulation: walk from the low corner to the high corner of
    // each cube along every axis permutation. All six tetrahedra share the
    // main diagonal and identical cubes produce matching face diagonals.
    const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                             {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          const int base[3] = {i, j, k};
          for (const auto& p : perms) {
            int idx[3] = {base[0], base[1], base[2]};
            Cell c;
            c.verts.push_back(grid_vert(n, idx[0], idx[1], idx[2]));
            idx[p[0]] += 1;
            c.verts.push_back(grid_vert(n, idx[0], idx[1], idx[2]));
            idx[p[1]] += 1;
            c.verts.push_back(grid_vert(n, idx[0], idx[1], idx[2]));
            idx[p[2]] += 1;
            c.verts.push_back(grid_vert(n, idx[0], idx[1], idx[2]));
            // Normalize to positive orientation.
            if (tet_volume(m.verts[c.verts[0]], m.verts[c.verts[1]],
                           m.verts[c.verts[2]], m.verts[c.verts[3]]) < 0.0)
              std::swap(c.verts[2], c.verts[3]);
            m.cells.push_back(std::move(c));
          }
        }
  }
  finalize(m);
  return m;
}

Mesh build_simplex(int dim, int n) {
  return build_simplex(dim, n, Vec3::Zero(), Vec3::Ones());
}

namespace {

// Validity screen used while perturbing: every corner simplex of every cell
// incident to the moved vertex must keep positive orientation with respect
// to provisional (vertex-averaged) face and cell midpoints.
bool star_shaped(const Mesh& m, int cell_id) {
  const Cell& cell = m.cells[cell_id];
  const Vec3 ref = vertex_mean(m, cell.verts);
  for (int fid : cell.faces) {
    const Face& f = m.faces[fid];
    const double sign = (f.cells[0] == cell_id) ? 1.0 : -1.0;
    if (m.dim == 2) {
      const Vec3 vi = m.verts[f.verts[0]], vj = m.verts[f.verts[1]];
      const Vec3 mid = 0.5 * (vi + vj);
      if (sign * tri_area2(ref, vi, mid) <= 0.0) return false;
      if (sign * tri_area2(ref, mid, vj) <= 0.0) return false;
      continue;
    }
    const int k = static_cast<int>(f.verts.size());
    const Vec3 fc = vertex_mean(m, f.verts);
    for (int i = 0; i < k; ++i) {
      const Vec3 vi = m.verts[f.verts[i]], vj = m.verts[f.verts[(i + 1) % k]];
      const Vec3 mid = 0.5 * (vi + vj);
      if (sign * tet_volume(ref, fc, vi, mid) <= 0.0) return false;
      if (sign * tet_volume(ref, fc, mid, vj) <= 0.0) return false;
    }
  }
  return true;
}

}  // namespace

Mesh perturb(const Mesh& m, double factor, std::uint64_t seed,
             const std::vector<FrozenPlane>& frozen) {
  if (!(factor >= 0.0 && factor < 0.5))
    throw ConfigError("perturbation factor must lie in [0, 0.5), got " +
                      std::to_string(factor));
  Mesh out = m;
  if (factor == 0.0) return out;

  // Shortest incident edge per vertex.
  const int nv = static_cast<int>(m.verts.size());
  std::vector<double> h_local(nv, std::numeric_limits<double>::max());
  auto feed = [&](int a, int b) {
    const double len = (m.verts[a] - m.verts[b]).norm();
    h_local[a] = std::min(h_local[a], len);
    h_local[b] = std::min(h_local[b], len);
  };
  if (m.dim == 2) {
    for (const auto& f : m.faces) feed(f.verts[0], f.verts[1]);
  } else {
    for (const auto& e : m.edges) feed(e.a, e.b);
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double tol = 1e-12;

  for (int v = 0; v < nv; ++v) {
    if (m.boundary_vertex[v]) continue;
    const Vec3 orig = m.verts[v];
    bool placed = false;
    for (int attempt = 0; attempt < 10 && !placed; ++attempt) {
      Vec3 d = Vec3::Zero();
      do {
        for (int a = 0; a < m.dim; ++a) d[a] = unit(rng);
      } while (d.squaredNorm() > 1.0);
      d *= factor * h_local[v];
      for (const auto& p : frozen)
        if (std::abs(orig[p.axis] - p.value) <= tol) d[p.axis] = 0.0;
      out.verts[v] = orig + d;
      placed = true;
      for (int c : m.vertex_cells[v])
        if (!star_shaped(out, c)) {
          placed = false;
          break;
        }
      if (!placed) out.verts[v] = orig;
    }
    if (!placed)
      throw NumericalError(
          "degenerate mesh: perturbation factor " + std::to_string(factor) +
          " keeps inverting cells at vertex " + std::to_string(v));
  }
  compute_geometry(out);
  return out;
}

}  // namespace mpsaw
