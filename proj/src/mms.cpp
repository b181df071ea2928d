#include "mpsaw/mms.hpp"

#include <algorithm>
#include <cmath>

#include "mpsaw/errors.hpp"
#include "mpsaw/material.hpp"

namespace mpsaw {

namespace {

double contrast_2d(const Vec3& p, double kappa) {
  return std::min(p[0], p[1]) > 0.5 ? kappa : 1.0;
}

double contrast_3d(const Vec3& p, double kappa) {
  return std::min({p[0], p[1], p[2]}) > 0.5 ? kappa : 1.0;
}

}  // namespace

ManufacturedCase case_2d(double kappa, double alpha) {
  if (!(kappa > 0.0)) throw ConfigError("manufactured case: kappa must be positive");
  ManufacturedCase mc;
  mc.dim = 2;
  mc.kappa = kappa;
  mc.alpha = alpha;
  mc.u = [kappa](const Vec3& p) {
    const double X = p[0] - 0.5, Y = p[1] - 0.5;
    const double s = contrast_2d(p, kappa);
    return Vec3(X * X * Y * Y / s, -2.0 / 3.0 * X * Y * Y * Y / s, 0.0);
  };
  mc.grad_u = [kappa](const Vec3& p) {
    const double X = p[0] - 0.5, Y = p[1] - 0.5;
    const double s = contrast_2d(p, kappa);
    Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
    g(0, 0) = 2.0 * X * Y * Y / s;
    g(0, 1) = 2.0 * X * X * Y / s;
    g(1, 0) = -2.0 / 3.0 * Y * Y * Y / s;
    g(1, 1) = -2.0 * X * Y * Y / s;
    return g;
  };
  mc.stress = [](const Vec3& p) {
    const double X = p[0] - 0.5, Y = p[1] - 0.5;
    Eigen::Matrix3d s = Eigen::Matrix3d::Zero();
    s(0, 0) = 4.0 * X * Y * Y;
    s(1, 1) = -4.0 * X * Y * Y;
    s(0, 1) = s(1, 0) = 2.0 * X * X * Y - 2.0 / 3.0 * Y * Y * Y;
    return s;
  };
  mc.body_force = [](const Vec3& p) {
    const double X = p[0] - 0.5, Y = p[1] - 0.5;
    return Vec3(-2.0 * X * X - 2.0 * Y * Y, 4.0 * X * Y, 0.0);
  };
  return mc;
}

ManufacturedCase case_3d(double kappa, double alpha) {
  if (!(kappa > 0.0)) throw ConfigError("manufactured case: kappa must be positive");
  ManufacturedCase mc;
  mc.dim = 3;
  mc.kappa = kappa;
  mc.alpha = alpha;
  mc.u = [kappa](const Vec3& p) {
    const double X = p[0] - 0.5, Y = p[1] - 0.5, Z = p[2] - 0.5;
    const double s = contrast_3d(p, kappa);
    const double q = X * X * Y * Y * Z * Z;
    return Vec3(q / s, q / s,
                -2.0 / 3.0 * (X * Y * Y + X * X * Y) * Z * Z * Z / s);
  };
  mc.grad_u = [kappa](const Vec3& p) {
    const double X = p[0] - 0.5, Y = p[1] - 0.5, Z = p[2] - 0.5;
    const double s = contrast_3d(p, kappa);
    Eigen::Matrix3d g;
    g(0, 0) = 2.0 * X * Y * Y * Z * Z;
    g(0, 1) = 2.0 * X * X * Y * Z * Z;
    g(0, 2) = 2.0 * X * X * Y * Y * Z;
    g.row(1) = g.row(0);
    g(2, 0) = -2.0 / 3.0 * (Y * Y + 2.0 * X * Y) * Z * Z * Z;
    g(2, 1) = -2.0 / 3.0 * (2.0 * X * Y + X * X) * Z * Z * Z;
    g(2, 2) = -2.0 * (X * Y * Y + X * X * Y) * Z * Z;
    return (g / s).eval();
  };
  mc.stress = [](const Vec3& p) {
    const double X = p[0] - 0.5, Y = p[1] - 0.5, Z = p[2] - 0.5;
    Eigen::Matrix3d s;
    s(0, 0) = 4.0 * X * Y * Y * Z * Z;
    s(1, 1) = 4.0 * X * X * Y * Z * Z;
    s(2, 2) = -4.0 * (X * Y * Y + X * X * Y) * Z * Z;
    s(0, 1) = s(1, 0) = 2.0 * (X * X * Y + X * Y * Y) * Z * Z;
    s(0, 2) = s(2, 0) =
        2.0 * X * X * Y * Y * Z - 2.0 / 3.0 * (Y * Y + 2.0 * X * Y) * Z * Z * Z;
    s(1, 2) = s(2, 1) =
        2.0 * X * X * Y * Y * Z - 2.0 / 3.0 * (2.0 * X * Y + X * X) * Z * Z * Z;
    return s;
  };
  mc.body_force = [](const Vec3& p) {
    const double X = p[0] - 0.5, Y = p[1] - 0.5, Z = p[2] - 0.5;
    const double f12 =
        -2.0 * (X * X * Y * Y + X * X * Z * Z + Y * Y * Z * Z);
    return Vec3(f12, f12,
                (X + Y) * (4.0 * X * Y * Z + 4.0 / 3.0 * Z * Z * Z));
  };
  return mc;
}

ManufacturedCase make_case(int dim, double kappa, double alpha) {
  if (dim == 2) return case_2d(kappa, alpha);
  if (dim == 3) return case_3d(kappa, alpha);
  throw ConfigError("manufactured case: dimension must be 2 or 3");
}

ManufacturedCase linear_case(int dim, const Eigen::Matrix3d& A, const Vec3& b,
                             double mu, double lambda) {
  ManufacturedCase mc;
  mc.dim = dim;
  mc.kappa = 1.0;
  mc.alpha = lambda / mu;
  Eigen::Matrix3d Ad = Eigen::Matrix3d::Zero();
  Ad.topLeftCorner(dim, dim) = A.topLeftCorner(dim, dim);
  Vec3 bd = Vec3::Zero();
  bd.head(dim) = b.head(dim);
  const Eigen::Matrix3d sym = 0.5 * (Ad + Ad.transpose());
  const Eigen::Matrix3d sig = apply_stiffness(mu, lambda, sym, dim);
  mc.u = [Ad, bd](const Vec3& p) { return Vec3(Ad * p + bd); };
  mc.grad_u = [Ad](const Vec3&) { return Ad; };
  mc.stress = [sig](const Vec3&) { return sig; };
  mc.body_force = [](const Vec3&) { return Vec3::Zero(); };
  return mc;
}

}  // namespace mpsaw
