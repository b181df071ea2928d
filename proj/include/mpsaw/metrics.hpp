#pragma once
#include <utility>
#include <vector>

#include "mpsaw/mms.hpp"
#include "mpsaw/system.hpp"

namespace mpsaw {

// Volume-weighted relative root-mean-square of u(x_K) - u_K. Falls back to
// the absolute norm when the exact field vanishes identically on the centers.
double displacement_error(const Mesh& m, const DisplacementField& field,
                          const ManufacturedCase& mc);

// Area-weighted relative root-mean-square of the traction densities
// T_sigma / m_sigma against stress(x_sigma) . n.
double stress_error(const Mesh& m, const TractionField& t,
                    const ManufacturedCase& mc);

struct AngularMomentum {
  double mean_abs = 0.0;   // mean |omega_K|, torque of tangential tractions
  double mean_diff = 0.0;  // mean |omega_K - omega_K(exact tractions)|
};

AngularMomentum angular_momentum(const Mesh& m, const TractionField& t,
                                 const ManufacturedCase& mc);

// Least-squares slope of log(error) against log(dof^(1/dim)), negated so a
// second-order method reports 2. Requires >= 2 samples with positive errors.
double fit_rate(const std::vector<std::pair<double, double>>& dof_error,
                int dim);

}  // namespace mpsaw
