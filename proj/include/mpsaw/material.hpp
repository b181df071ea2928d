#pragma once
#include <vector>

#include <Eigen/Dense>

#include "mpsaw/mesh.hpp"

namespace mpsaw {

// Per-cell isotropic Lame parameters. The stiffness acts on full,
// unsymmetrized gradient tensors: C:G = 2 mu G + lambda tr(G) I, so the
// symmetric part of C:G is the usual 2 mu eps + lambda tr(eps) I.
struct IsotropicField {
  std::vector<double> mu;
  std::vector<double> lambda;
  double kappa = 1.0;  // contrast used to build the field, 1 = homogeneous
  double alpha = 0.0;  // lambda / mu

  double mu_max() const;
  bool homogeneous() const;
};

// mu = 1 outside the subdomain where every coordinate of the cell center
// exceeds 1/2, mu = kappa inside it; lambda = alpha * mu.
IsotropicField from_indicator(const Mesh& m, double kappa, double alpha);
IsotropicField uniform_field(const Mesh& m, double mu, double lambda);

Eigen::Matrix3d apply_stiffness(double mu, double lambda,
                                const Eigen::Matrix3d& G, int dim);

double poisson_ratio(double alpha);  // nu = alpha / (2 (alpha + 1))

}  // namespace mpsaw
