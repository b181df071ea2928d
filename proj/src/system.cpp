#include "mpsaw/system.hpp"

#include <cinttypes>
#include <cstdio>

#include <Eigen/SparseLU>

#include "mpsaw/errors.hpp"

namespace mpsaw {

Eigen::VectorXd boundary_values(const Mesh& m, const SubGeometry& sg,
                                const Discretization& disc,
                                const BoundaryConditions& bc) {
  const int D = m.dim;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(3 * disc.slots.count);
  for (std::size_t f = 0; f < m.faces.size(); ++f) {
    if (!m.boundary(int(f))) continue;
    const int base = disc.slots.base[f];
    for (std::size_t i = 0; i < m.faces[f].verts.size(); ++i) {
      Vec3 value = Vec3::Zero();
      if (bc.type[f] == BCType::Dirichlet) {
        value = bc.displacement(sg.continuity_point[f][i]);
      } else {
        value = sg.subface_area[f][i] *
                bc.traction(sg.subface_centroid[f][i], m.faces[f].normal);
      }
      for (int d = D; d < 3; ++d) value[d] = 0.0;
      w.segment<3>(3 * (base + int(i))) = value;
    }
  }
  return w;
}

GlobalSystem assemble(const Mesh& m, const Discretization& disc,
                      const BodyForce& f, const Eigen::VectorXd& bvals) {
  const int D = m.dim;
  const long N = D * long(m.cells.size());
  GlobalSystem sys;
  sys.dim = D;
  sys.rhs.setZero(N);
  for (std::size_t c = 0; c < m.cells.size(); ++c) {
    const Vec3 fx = f(m.cells[c].center);
    for (int i = 0; i < D; ++i)
      sys.rhs[long(c) * D + i] = -fx[i] * m.cells[c].volume;
  }

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(m.faces.size() * 4 * std::size_t(D) * D * 8);
  for (std::size_t f_id = 0; f_id < m.faces.size(); ++f_id) {
    const Face& face = m.faces[f_id];
    for (std::size_t corner = 0; corner < face.verts.size(); ++corner) {
      const SubfaceStencil& st = disc.stencils[f_id][corner];
      for (int side = 0; side < 2; ++side) {
        const int K = face.cells[side];
        if (K < 0) continue;
        const double sgn = side == 0 ? 1.0 : -1.0;
        for (std::size_t j = 0; j < st.cells.size(); ++j) {
          const auto& blk = st.cell_blocks[j];
          for (int a = 0; a < D; ++a)
            for (int b = 0; b < D; ++b)
              if (blk(a, b) != 0.0)
                trip.emplace_back(K * D + a, st.cells[j] * D + b,
                                  sgn * blk(a, b));
        }
        for (std::size_t j = 0; j < st.slots.size(); ++j) {
          const auto& blk = st.slot_blocks[j];
          const Vec3 wj = bvals.segment<3>(3 * st.slots[j]);
          for (int a = 0; a < D; ++a)
            sys.rhs[K * D + a] -= sgn * blk.row(a).dot(wj);
        }
      }
    }
    if (face.cells[1] < 0 &&
        disc.slots.face_type[f_id] == BCType::Dirichlet)
      sys.any_dirichlet = true;
  }
  sys.S.resize(N, N);
  sys.S.setFromTriplets(trip.begin(), trip.end());
  sys.S.makeCompressed();
  return sys;
}

DisplacementField solve(const GlobalSystem& sys) {
  if (!sys.any_dirichlet)
    throw NumericalError(
        "global system has no Dirichlet data; rigid-body translations and "
        "rotations make it singular");
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(sys.S);
  lu.factorize(sys.S);
  if (lu.info() != Eigen::Success)
    throw NumericalError("sparse factorization failed: " + lu.lastErrorMessage());
  DisplacementField field;
  Eigen::VectorXd x = lu.solve(sys.rhs);
  if (lu.info() != Eigen::Success)
    throw NumericalError("sparse solve failed");
  const double bnorm = sys.rhs.norm();
  field.residual = (sys.S * x - sys.rhs).norm() / (bnorm > 0.0 ? bnorm : 1.0);
  const int D = sys.dim;
  field.u.resize(std::size_t(x.size() / D));
  for (std::size_t c = 0; c < field.u.size(); ++c) {
    field.u[c] = Vec3::Zero();
    for (int i = 0; i < D; ++i) field.u[c][i] = x[long(c) * D + i];
  }
  return field;
}

TractionField face_tractions(const Mesh& m, const Discretization& disc,
                             const DisplacementField& field,
                             const Eigen::VectorXd& bvals) {
  TractionField tf;
  tf.total.assign(m.faces.size(), Vec3::Zero());
  for (std::size_t f = 0; f < m.faces.size(); ++f) {
    Vec3 T = Vec3::Zero();
    for (std::size_t corner = 0; corner < m.faces[f].verts.size(); ++corner) {
      const SubfaceStencil& st = disc.stencils[f][corner];
      for (std::size_t j = 0; j < st.cells.size(); ++j)
        T += st.cell_blocks[j] * field.u[st.cells[j]];
      for (std::size_t j = 0; j < st.slots.size(); ++j)
        T += st.slot_blocks[j] * Vec3(bvals.segment<3>(3 * st.slots[j]));
    }
    tf.total[f] = T;
  }
  return tf;
}

std::vector<Vec3> momentum_residual(const Mesh& m, const TractionField& t,
                                    const BodyForce& f) {
  std::vector<Vec3> res(m.cells.size(), Vec3::Zero());
  for (std::size_t c = 0; c < m.cells.size(); ++c)
    res[c] = f(m.cells[c].center) * m.cells[c].volume;
  for (std::size_t fid = 0; fid < m.faces.size(); ++fid) {
    const Face& face = m.faces[fid];
    res[face.cells[0]] += t.total[fid];
    if (face.cells[1] >= 0) res[face.cells[1]] -= t.total[fid];
  }
  return res;
}

void export_matrix(const Eigen::SparseMatrix<double>& S,
                   const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw IoError("cannot open " + path + " for writing");
  for (int k = 0; k < S.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(S, k); it; ++it)
      std::fprintf(fp, "%ld %ld %.17g\n", long(it.row()), long(it.col()),
                   it.value());
  std::fclose(fp);
}

}  // namespace mpsaw
