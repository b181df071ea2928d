#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mpsaw/config.hpp"
#include "mpsaw/errors.hpp"
#include "mpsaw/material.hpp"
#include "mpsaw/metrics.hpp"
#include "mpsaw/mms.hpp"
#include "mpsaw/study.hpp"
#include "mpsaw/system.hpp"

namespace py = pybind11;
using namespace mpsaw;

namespace {

Eigen::MatrixXd displacement_matrix(const DisplacementField& f, int dim) {
  Eigen::MatrixXd out(f.u.size(), dim);
  for (size_t i = 0; i < f.u.size(); ++i)
    for (int d = 0; d < dim; ++d) out(i, d) = f.u[i][d];
  return out;
}

Eigen::MatrixXd traction_matrix(const TractionField& t, int dim) {
  Eigen::MatrixXd out(t.total.size(), dim);
  for (size_t i = 0; i < t.total.size(); ++i)
    for (int d = 0; d < dim; ++d) out(i, d) = t.total[i][d];
  return out;
}

struct PySolution {
  int dim = 2;
  Eigen::MatrixXd u;
  Eigen::MatrixXd tractions;
  double eps_d = 0, eps_pi = 0;
  double mean_ang_mom = 0, ang_mom_diff = 0;
  double min_theta = 0;
  double residual = 0;
  std::uint64_t mesh_hash = 0;
};

PySolution solve_manufactured(const Mesh& m, double kappa, double alpha,
                              const std::string& method,
                              const std::string& averaging,
                              const std::string& eta, bool audit) {
  SubGeometry sg = compute_subgeometry(m, eta);
  IsotropicField mat = from_indicator(m, kappa, alpha);
  ManufacturedCase mc = make_case(m.dim, kappa, alpha);
  BoundaryConditions bc = dirichlet_all(m, mc.u);
  DiscOptions opt;
  if (method == "mpsa-w")
    opt.method = Method::MpsaW;
  else if (method == "mpsa-o-simplex")
    opt.method = Method::MpsaOSimplex;
  else if (method == "mpfa-scalar")
    opt.method = Method::MpfaScalar;
  else
    throw ConfigError("unknown method '" + method + "'");
  if (averaging == "vertex")
    opt.averaging = Averaging::Vertex;
  else if (averaging == "edge")
    opt.averaging = Averaging::Edge;
  else
    throw ConfigError("unknown averaging '" + averaging + "'");
  opt.audit = audit && opt.method != Method::MpfaScalar;

  Discretization disc = discretize_all(m, sg, mat, bc, opt);
  Eigen::VectorXd bvals = boundary_values(m, sg, disc, bc);
  GlobalSystem sys = assemble(m, disc, mc.body_force, bvals);
  DisplacementField field = solve(sys);
  TractionField tf = face_tractions(m, disc, field, bvals);

  PySolution out;
  out.dim = m.dim;
  out.u = displacement_matrix(field, m.dim);
  out.tractions = traction_matrix(tf, m.dim);
  out.eps_d = displacement_error(m, field, mc);
  out.eps_pi = stress_error(m, tf, mc);
  AngularMomentum am = angular_momentum(m, tf, mc);
  out.mean_ang_mom = am.mean_abs;
  out.ang_mom_diff = am.mean_diff;
  out.min_theta = opt.audit ? disc.audit.min_theta()
                            : std::numeric_limits<double>::quiet_NaN();
  out.residual = field.residual;
  out.mesh_hash = mesh_hash(m);
  return out;
}

}  // namespace

PYBIND11_MODULE(_mpsaw, mod) {
  mod.doc() = "cell-centered finite-volume elasticity";

  py::register_exception<ConfigError>(mod, "ConfigError");
  py::register_exception<NumericalError>(mod, "NumericalError");
  py::register_exception<IoError>(mod, "IoError");

  py::class_<Mesh>(mod, "Mesh")
      .def_readonly("dim", &Mesh::dim)
      .def_property_readonly(
          "n_vertices", [](const Mesh& m) { return m.verts.size(); })
      .def_property_readonly("n_cells",
                             [](const Mesh& m) { return m.cells.size(); })
      .def_property_readonly("n_faces",
                             [](const Mesh& m) { return m.faces.size(); })
      .def_property_readonly(
          "cell_centers",
          [](const Mesh& m) {
            Eigen::MatrixXd out(m.cells.size(), m.dim);
            for (size_t c = 0; c < m.cells.size(); ++c)
              for (int d = 0; d < m.dim; ++d)
                out(c, d) = m.cells[c].center[d];
            return out;
          })
      .def_property_readonly(
          "cell_volumes",
          [](const Mesh& m) {
            Eigen::VectorXd v(m.cells.size());
            for (size_t c = 0; c < m.cells.size(); ++c)
              v[c] = m.cells[c].volume;
            return v;
          })
      .def("all_simplex", &Mesh::all_simplex)
      .def("__repr__", [](const Mesh& m) {
        return "<Mesh dim=" + std::to_string(m.dim) +
               " cells=" + std::to_string(m.cells.size()) + ">";
      });

  mod.def("build_cartesian",
          [](int dim, int n) { return build_cartesian(dim, n); },
          py::arg("dim"), py::arg("n"));
  mod.def("build_simplex",
          [](int dim, int n) { return build_simplex(dim, n); },
          py::arg("dim"), py::arg("n"));
  mod.def(
      "perturb",
      [](const Mesh& m, double factor, std::uint64_t seed,
         bool freeze_interface) {
        std::vector<FrozenPlane> planes;
        if (freeze_interface)
          for (int a = 0; a < m.dim; ++a) planes.push_back({a, 0.5});
        return perturb(m, factor, seed, planes);
      },
      py::arg("mesh"), py::arg("factor"), py::arg("seed"),
      py::arg("freeze_interface") = false);
  mod.def("read_mesh", &read_mesh, py::arg("path"));
  mod.def("write_mesh", &write_mesh, py::arg("mesh"), py::arg("path"));
  mod.def("mesh_hash", &mesh_hash, py::arg("mesh"));

  py::class_<PySolution>(mod, "Solution")
      .def_readonly("dim", &PySolution::dim)
      .def_readonly("u", &PySolution::u)
      .def_readonly("tractions", &PySolution::tractions)
      .def_readonly("eps_d", &PySolution::eps_d)
      .def_readonly("eps_pi", &PySolution::eps_pi)
      .def_readonly("mean_ang_mom", &PySolution::mean_ang_mom)
      .def_readonly("ang_mom_diff", &PySolution::ang_mom_diff)
      .def_readonly("min_theta", &PySolution::min_theta)
      .def_readonly("residual", &PySolution::residual)
      .def_readonly("mesh_hash", &PySolution::mesh_hash);

  mod.def("solve_manufactured", &solve_manufactured, py::arg("mesh"),
          py::arg("kappa") = 1.0, py::arg("alpha") = 1.0,
          py::arg("method") = "mpsa-w", py::arg("averaging") = "vertex",
          py::arg("eta") = "auto", py::arg("audit") = false,
          "Discretize and solve the built-in smooth verification problem "
          "with exact Dirichlet data; returns fields and error norms.");

  py::class_<LevelResult>(mod, "LevelResult")
      .def_readonly("level", &LevelResult::level)
      .def_readonly("dof", &LevelResult::dof)
      .def_readonly("h", &LevelResult::h)
      .def_readonly("eps_d", &LevelResult::eps_d)
      .def_readonly("eps_pi", &LevelResult::eps_pi)
      .def_readonly("rate_d", &LevelResult::rate_d)
      .def_readonly("rate_pi", &LevelResult::rate_pi)
      .def_readonly("min_theta", &LevelResult::min_theta)
      .def_readonly("mean_ang_mom", &LevelResult::mean_ang_mom)
      .def_readonly("ang_mom_diff", &LevelResult::ang_mom_diff)
      .def_readonly("mesh_hash", &LevelResult::mesh_hash);

  py::class_<CurveResult>(mod, "CurveResult")
      .def_readonly("dim", &CurveResult::dim)
      .def_readonly("family", &CurveResult::family)
      .def_property_readonly(
          "method",
          [](const CurveResult& c) { return to_string(c.method); })
      .def_property_readonly(
          "averaging",
          [](const CurveResult& c) { return to_string(c.averaging); })
      .def_readonly("kappa", &CurveResult::kappa)
      .def_readonly("alpha", &CurveResult::alpha)
      .def_readonly("perturb", &CurveResult::perturb)
      .def_readonly("levels", &CurveResult::levels)
      .def_readonly("rate_d_fit", &CurveResult::rate_d_fit)
      .def_readonly("rate_pi_fit", &CurveResult::rate_pi_fit)
      .def_readonly("rate_ang_fit", &CurveResult::rate_ang_fit)
      .def_readonly("rate_ang_diff_fit", &CurveResult::rate_ang_diff_fit)
      .def("label", &CurveResult::curve_label);

  py::class_<StudyResult>(mod, "StudyResult")
      .def_readonly("curves", &StudyResult::curves);

  mod.def(
      "run_study",
      [](const std::string& config_text) {
        return run_study(parse_config_text(config_text));
      },
      py::arg("config_text"),
      "Run a refinement study from configuration text (same format as the "
      "CLI config files).");
  mod.def("preset_text", &preset_text, py::arg("name"));
  mod.def("preset_names", [] { return preset_names(); });
}
