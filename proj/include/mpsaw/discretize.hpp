#pragma once
#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mpsaw/bc.hpp"
#include "mpsaw/material.hpp"
#include "mpsaw/mesh.hpp"

namespace mpsaw {

// mpsa-w: tractions from the cellwise stress plus the transposed patch
//   average (vertex patch, or edge patch in 3D), symmetry holding weakly.
// mpsa-o-simplex: tractions from the cellwise symmetrized stress; local
//   systems are only solvable on simplex grids.
// mpfa-scalar: D decoupled scalar diffusion problems with coefficient mu
//   and flux mu grad(u) . n; reference method for the lambda = 0 limit.
enum class Method { MpsaW, MpsaOSimplex, MpfaScalar };
enum class Averaging { Vertex, Edge };
enum class AvgWeights { Volume, Uniform };

std::string to_string(Method m);
std::string to_string(Averaging a);

struct DiscOptions {
  Method method = Method::MpsaW;
  Averaging averaging = Averaging::Vertex;
  AvgWeights weights = AvgWeights::Volume;
  bool neumann_average_term = true;  // keep the averaged stress in Neumann rows
  int threads = 0;                   // 0 = hardware concurrency
  bool audit = false;
  double theta_flag = 1e-8;  // audit flag threshold
};

// One sub-face of an interaction region. lc0/lc1 are indices into
// InteractionRegion::cells for the two sides (face cells[0] first, lc1 < 0 on
// the boundary); normal and tractions are oriented out of lc0.
struct RegionSubface {
  int face = -1;
  int corner = -1;  // index of the region vertex in faces[face].verts
  int lc0 = -1, lc1 = -1;
  BCType bc = BCType::Dirichlet;
  double area = 0.0;  // m_sigma^s
  Vec3 normal = Vec3::Zero();
  Vec3 xc = Vec3::Zero();        // continuity point
  Vec3 centroid = Vec3::Zero();  // sub-face centroid (Neumann quadrature)
  std::array<EdgePart, 2> parts = {};  // 3D diagonal split, else unused
};

struct InteractionRegion {
  int vertex = -1;
  std::vector<int> cells;  // global ids, ascending
  std::vector<double> subvol;
  std::vector<RegionSubface> subfaces;
  int n_interior = 0;
  int n_boundary = 0;

  int local_cell(int global) const;  // -1 if absent
  int n_gradient_unknowns(int dim) const;
  int n_equations(int dim) const;
  int n_displacement_rows(int dim) const;  // continuity + Dirichlet rows
};

std::vector<InteractionRegion> build_regions(const Mesh& m,
                                             const SubGeometry& sg,
                                             const BoundaryConditions& bc);

// Local system rows ordered: per interior sub-face D stress-balance rows then
// D displacement-continuity rows, per boundary sub-face D rows. Unknowns are
// the D x D gradients per region cell, row-major within each cell block. The
// value columns are cell displacements (D per cell) followed by one D-block
// per boundary sub-face (prescribed displacement, or sub-face total traction).
struct LocalSystem {
  int dim = 2;
  int ncells = 0;
  Eigen::MatrixXd A;  // gradient coefficients
  Eigen::MatrixXd R;  // displacement / boundary-data coefficients
  std::vector<double> row_scale;
  int boundary_offset = 0;            // first boundary-data column in R
  std::vector<int> slot_of_subface;   // per region sub-face, -1 if interior
};

// Gradient response: G = A^{-1} R, mapping stacked cell displacements and
// boundary data to all local gradients.
struct LocalSolve {
  Eigen::MatrixXd G;
  double rcond = 0.0;
};

LocalSystem assemble_local(const InteractionRegion& r, const Mesh& m,
                           const IsotropicField& mat, const DiscOptions& opt);
LocalSolve solve_local(const LocalSystem& sys, int vertex);

// Traction of one sub-face, seen from the cell given by `side` (0 or 1, the
// sign convention of RegionSubface): T = sum_i cell_block[i] u_{cells[i]}
// + sum_j slot_block[j] w_{slots[j]} with w the boundary-data vector.
struct SubfaceStencil {
  std::vector<int> cells;  // global cell ids
  std::vector<Eigen::Matrix3d> cell_blocks;
  std::vector<int> slots;  // global boundary-data slot ids
  std::vector<Eigen::Matrix3d> slot_blocks;
};

struct BoundarySlots {
  std::vector<int> base;  // per face: slot id of corner 0, -1 if interior
  int count = 0;          // slots are (base[f] + corner), one per sub-face
  std::vector<BCType> face_type;  // copied from the boundary conditions
};

struct CoercivityEntry {
  int vertex = -1;
  double theta = 0.0;
  double energy_cond = 0.0;
  bool skipped = false;  // single-cell region
  bool degenerate = false;
};

struct CoercivityReport {
  std::vector<CoercivityEntry> entries;
  double theta_flag = 1e-8;

  double min_theta() const;
  double percentile_theta(double p) const;
  int flagged() const;
};

struct RegionStats {
  long interior_regions = 0;
  long boundary_regions = 0;
  long interior_disp_rows_min = 0, interior_disp_rows_max = 0;
  double interior_disp_rows_mean = 0.0;
  long max_system_rows = 0;
};

struct Discretization {
  int dim = 2;
  DiscOptions options;
  std::vector<std::vector<SubfaceStencil>> stencils;  // [face][corner]
  BoundarySlots slots;
  CoercivityReport audit;  // empty unless options.audit
  RegionStats stats;
  double min_rcond = 1.0;
};

// Runs the per-vertex assembly/solve over the whole mesh (optionally in
// parallel; output is identical regardless of thread count) and emits the
// sub-face traction stencils. Every interior stencil is assembled from both
// sides and verified to cancel; a mismatch indicates a broken local solve and
// raises a numerical error naming the vertex.
Discretization discretize_all(const Mesh& m, const SubGeometry& sg,
                              const IsotropicField& mat,
                              const BoundaryConditions& bc,
                              const DiscOptions& opt = {});

// Coercivity measure of one region: minimum generalized eigenvalue of the
// symmetrized local bilinear form against the local energy norm, restricted
// to the orthogonal complement of rigid motions about the vertex. Boundary
// data is closed homogeneously.
CoercivityEntry coercivity_audit(const InteractionRegion& r, const Mesh& m,
                                 const SubGeometry& sg,
                                 const IsotropicField& mat,
                                 const DiscOptions& opt);

}  // namespace mpsaw
