#pragma once
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mpsaw {

using Vec3 = Eigen::Vector3d;

struct Cell {
  std::vector<int> verts;  // canonical corner order, see builders/read_mesh
  std::vector<int> faces;
  Vec3 center = Vec3::Zero();  // volume centroid
  double volume = 0.0;
};

struct Face {
  // Vertex cycle. In 3D the cycle is counterclockwise as seen from outside
  // cells[0]; in 2D the pair (a,b) is ordered so that rotating b-a by -90
  // degrees gives the outward normal of cells[0].
  std::vector<int> verts;
  std::array<int, 2> cells = {-1, -1};  // cells[1] < 0 on the boundary
  std::vector<int> edges;  // 3D: edges[i] joins verts[i], verts[(i+1)%k]
  Vec3 center = Vec3::Zero();  // area centroid
  Vec3 normal = Vec3::Zero();  // unit, outward from cells[0]
  double area = 0.0;
};

struct Edge {
  int a = -1, b = -1;
};

// Cell-centered conforming mesh of triangles/quadrilaterals (2D) or
// tetrahedra/hexahedra (3D). Faces, edges and adjacency are derived; vertex
// coordinates plus cell-vertex lists are the only primary data.
struct Mesh {
  int dim = 2;
  std::vector<Vec3> verts;  // z = 0 in 2D
  std::vector<Cell> cells;
  std::vector<Face> faces;
  std::vector<Edge> edges;  // 3D only
  std::vector<std::vector<int>> vertex_cells;  // sorted cell ids per vertex
  std::vector<std::vector<int>> vertex_faces;  // sorted face ids per vertex
  std::vector<std::vector<int>> edge_cells;    // 3D: sorted cell ids per edge
  std::vector<char> boundary_vertex;
  Vec3 box_lo = Vec3::Zero(), box_hi = Vec3::Zero();  // generated-domain box

  bool boundary(int f) const { return faces[f].cells[1] < 0; }
  double distance(int c, int f) const {
    return (faces[f].center - cells[c].center).norm();
  }
  bool all_simplex() const;
  int n_boundary_faces() const;
  double max_cell_diameter() const;
};

Mesh build_cartesian(int dim, int n, const Vec3& lo, const Vec3& hi);
Mesh build_cartesian(int dim, int n);  // unit box
// 2D: each grid square cut by the (lo,lo)-(hi,hi) diagonal. 3D: each grid
// cube cut into six tetrahedra sharing the main diagonal, identically in
// every cube so shared faces match.
Mesh build_simplex(int dim, int n, const Vec3& lo, const Vec3& hi);
Mesh build_simplex(int dim, int n);

struct FrozenPlane {
  int axis = 0;
  double value = 0.0;
};

// Displaces every interior vertex by a uniform random vector of magnitude
// <= factor * (shortest incident edge). Boundary vertices stay put; vertices
// lying on a frozen plane keep their coordinate along that plane's normal.
// A displacement that would invert or degenerate an incident cell is
// resampled (up to 10 draws per vertex) before giving up.
Mesh perturb(const Mesh& m, double factor, std::uint64_t seed,
             const std::vector<FrozenPlane>& frozen = {});

Mesh read_mesh(const std::string& path);
Mesh mesh_from_string(const std::string& text,
                      const std::string& name = "<string>");
void write_mesh(const Mesh& m, const std::string& path);
std::string mesh_to_string(const Mesh& m);
std::uint64_t mesh_hash(const Mesh& m);  // FNV-1a over the text serialization

struct EdgePart {
  int edge = -1;
  double area = 0.0;
};

// Per-corner split of cells and faces. subcell_volume[c][i] belongs to
// cells[c].verts[i]; the face-indexed arrays follow faces[f].verts. Edge
// parts split each 3D sub-face along the diagonal from the corner vertex to
// the face center; their areas are measured in the projection onto the face
// normal so they sum exactly to the face area.
struct SubGeometry {
  double eta = 0.0;
  std::vector<std::vector<double>> subcell_volume;           // m_K^s
  std::vector<std::vector<double>> subface_area;             // m_sigma^s
  std::vector<std::vector<Vec3>> continuity_point;           // x_{sigma,C}^s
  std::vector<std::vector<Vec3>> subface_centroid;
  std::vector<std::vector<std::array<EdgePart, 2>>> edge_parts;  // 3D

  double cell_part_sum(int c) const;
  double face_part_sum(int f) const;
};

// eta is the continuity-point slide toward the corner vertex:
// x_C = eta * x_s + (1 - eta) * x_sigma, eta in [0,1).
SubGeometry compute_subgeometry(const Mesh& m, double eta);
SubGeometry compute_subgeometry(const Mesh& m, const std::string& eta);
double auto_eta(const Mesh& m);  // 1/3 on all-simplex meshes, else 0

// Internal: recompute face/cell geometry after vertex motion. Exposed for
// the perturbation path and tests.
void compute_geometry(Mesh& m);

}  // namespace mpsaw
