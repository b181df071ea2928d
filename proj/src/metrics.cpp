#include "mpsaw/metrics.hpp"

#include <cmath>

#include "mpsaw/errors.hpp"

namespace mpsaw {

double displacement_error(const Mesh& m, const DisplacementField& field,
                          const ManufacturedCase& mc) {
  double num = 0.0, den = 0.0;
  for (std::size_t c = 0; c < m.cells.size(); ++c) {
    const Vec3 ue = mc.u(m.cells[c].center);
    num += m.cells[c].volume * (ue - field.u[c]).squaredNorm();
    den += m.cells[c].volume * ue.squaredNorm();
  }
  if (den == 0.0) return std::sqrt(num);
  return std::sqrt(num) / std::sqrt(den);
}

double stress_error(const Mesh& m, const TractionField& t,
                    const ManufacturedCase& mc) {
  double num = 0.0, den = 0.0;
  for (std::size_t f = 0; f < m.faces.size(); ++f) {
    const Face& face = m.faces[f];
    const Vec3 exact = mc.stress(face.center) * face.normal;
    const Vec3 density = t.total[f] / face.area;
    num += face.area * (exact - density).squaredNorm();
    den += face.area * exact.squaredNorm();
  }
  if (den == 0.0) return std::sqrt(num);
  return std::sqrt(num) / std::sqrt(den);
}

AngularMomentum angular_momentum(const Mesh& m, const TractionField& t,
                                 const ManufacturedCase& mc) {
  std::vector<Vec3> omega(m.cells.size(), Vec3::Zero());
  std::vector<Vec3> omega_exact(m.cells.size(), Vec3::Zero());
  for (std::size_t f = 0; f < m.faces.size(); ++f) {
    const Face& face = m.faces[f];
    const Vec3 Te = mc.stress(face.center) * face.normal * face.area;
    for (int side = 0; side < 2; ++side) {
      const int K = face.cells[side];
      if (K < 0) continue;
      const double sgn = side == 0 ? 1.0 : -1.0;
      const Vec3 n = sgn * face.normal;
      const Vec3 arm = face.center - m.cells[K].center;
      const Vec3 T = sgn * t.total[f];
      const Vec3 Tt = T - T.dot(n) * n;
      omega[K] += Tt.cross(arm);
      const Vec3 Tex = sgn * Te;
      const Vec3 Tex_t = Tex - Tex.dot(n) * n;
      omega_exact[K] += Tex_t.cross(arm);
    }
  }
  AngularMomentum am;
  for (std::size_t c = 0; c < m.cells.size(); ++c) {
    am.mean_abs += omega[c].norm();
    am.mean_diff += (omega[c] - omega_exact[c]).norm();
  }
  am.mean_abs /= double(m.cells.size());
  am.mean_diff /= double(m.cells.size());
  return am;
}

double fit_rate(const std::vector<std::pair<double, double>>& dof_error,
                int dim) {
  if (dof_error.size() < 2)
    throw ConfigError("rate fit needs at least two levels");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(dof_error.size());
  for (const auto& [dof, err] : dof_error) {
    if (!(dof > 0.0) || !(err > 0.0))
      throw ConfigError("rate fit needs positive sizes and errors");
    const double x = std::log(dof) / double(dim);
    const double y = std::log(err);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw ConfigError("rate fit needs distinct sizes");
  return -(n * sxy - sx * sy) / denom;
}

}  // namespace mpsaw
