#include <cmath>

#include "local_kernels.hpp"
#include "mpsaw/discretize.hpp"
#include "mpsaw/errors.hpp"

namespace mpsaw {

LocalSystem assemble_local(const InteractionRegion& r, const Mesh& m,
                           const IsotropicField& mat, const DiscOptions& opt) {
  return detail::RegionKernel(r, m, mat, opt).assemble();
}

LocalSolve solve_local(const LocalSystem& sys, int vertex) {
  Eigen::VectorXd scale =
      Eigen::Map<const Eigen::VectorXd>(sys.row_scale.data(),
                                        long(sys.row_scale.size()));
  Eigen::MatrixXd As = scale.asDiagonal() * sys.A;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(As);
  const Eigen::VectorXd udiag = lu.matrixLU().diagonal().cwiseAbs();
  const double umax = udiag.maxCoeff();
  const double umin = udiag.minCoeff();
  if (!(umax > 0.0) || umin < 1e-13 * umax)
    throw NumericalError("singular local system at vertex " +
                         std::to_string(vertex) +
                         " (pivot ratio " +
                         std::to_string(umax > 0 ? umin / umax : 0.0) + ")");
  LocalSolve ls;
  ls.rcond = umin / umax;
  ls.G = lu.solve(scale.asDiagonal() * sys.R);
  return ls;
}

}  // namespace mpsaw
