#pragma once
#include <functional>

#include <Eigen/Dense>

#include "mpsaw/mesh.hpp"

namespace mpsaw {

// Analytic displacement/stress/forcing set driving the verification runs.
// The displacement scales inversely with the material contrast on the
// subdomain min(x_i) > 1/2, so the stress field is smooth across the
// interface and independent of both kappa and alpha; body_force balances the
// stress divergence (div(stress) + body_force = 0).
struct ManufacturedCase {
  int dim = 2;
  double kappa = 1.0;
  double alpha = 1.0;
  std::function<Vec3(const Vec3&)> u;
  std::function<Eigen::Matrix3d(const Vec3&)> grad_u;
  std::function<Eigen::Matrix3d(const Vec3&)> stress;
  std::function<Vec3(const Vec3&)> body_force;
};

ManufacturedCase case_2d(double kappa, double alpha);
ManufacturedCase case_3d(double kappa, double alpha);
ManufacturedCase make_case(int dim, double kappa, double alpha);

// u = A x + b on a homogeneous material: constant stress, zero body force.
ManufacturedCase linear_case(int dim, const Eigen::Matrix3d& A, const Vec3& b,
                             double mu, double lambda);

}  // namespace mpsaw
