#include "mpsaw/material.hpp"

#include <algorithm>

#include "mpsaw/errors.hpp"

namespace mpsaw {

double IsotropicField::mu_max() const {
  return *std::max_element(mu.begin(), mu.end());
}

bool IsotropicField::homogeneous() const {
  for (std::size_t i = 1; i < mu.size(); ++i)
    if (mu[i] != mu[0] || lambda[i] != lambda[0]) return false;
  return true;
}

IsotropicField from_indicator(const Mesh& m, double kappa, double alpha) {
  if (!(kappa > 0.0)) throw ConfigError("material: kappa must be positive");
  if (!(alpha >= 0.0))
    throw ConfigError("material: alpha must be non-negative");
  IsotropicField f;
  f.kappa = kappa;
  f.alpha = alpha;
  f.mu.resize(m.cells.size());
  f.lambda.resize(m.cells.size());
  for (std::size_t c = 0; c < m.cells.size(); ++c) {
    const Vec3& x = m.cells[c].center;
    double mn = x[0];
    for (int d = 1; d < m.dim; ++d) mn = std::min(mn, x[d]);
    const double mu = mn > 0.5 ? kappa : 1.0;
    f.mu[c] = mu;
    f.lambda[c] = alpha * mu;
  }
  return f;
}

IsotropicField uniform_field(const Mesh& m, double mu, double lambda) {
  if (!(mu > 0.0)) throw ConfigError("material: mu must be positive");
  if (!(lambda >= 0.0))
    throw ConfigError("material: lambda must be non-negative");
  IsotropicField f;
  f.kappa = 1.0;
  f.alpha = lambda / mu;
  f.mu.assign(m.cells.size(), mu);
  f.lambda.assign(m.cells.size(), lambda);
  return f;
}

Eigen::Matrix3d apply_stiffness(double mu, double lambda,
                                const Eigen::Matrix3d& G, int dim) {
  Eigen::Matrix3d out = 2.0 * mu * G;
  const double tr = lambda * G.trace();
  for (int d = 0; d < dim; ++d) out(d, d) += tr;
  return out;
}

double poisson_ratio(double alpha) { return alpha / (2.0 * (alpha + 1.0)); }

}  // namespace mpsaw
