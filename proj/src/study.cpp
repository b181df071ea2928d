#include "mpsaw/study.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <tuple>

#include "mpsaw/errors.hpp"
#include "mpsaw/material.hpp"
#include "mpsaw/metrics.hpp"
#include "mpsaw/mms.hpp"

namespace mpsaw {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct MeshBundle {
  Mesh mesh;
  SubGeometry sg;
  std::uint64_t hash = 0;
  std::uint64_t seed_used = 0;
};

using MeshKey = std::tuple<int, std::string, int, double, bool>;

MeshBundle make_bundle(const StudyConfig& cfg, int dim,
                       const std::string& family, int n, int level_index,
                       double pf, bool frozen) {
  MeshBundle b;
  b.mesh = family == "cartesian" ? build_cartesian(dim, n)
                                 : build_simplex(dim, n);
  b.seed_used = cfg.seed + (std::uint64_t)level_index;
  if (pf > 0.0) {
    std::vector<FrozenPlane> planes;
    if (frozen)
      for (int a = 0; a < dim; ++a) planes.push_back({a, 0.5});
    b.mesh = perturb(b.mesh, pf, b.seed_used, planes);
  }
  b.sg = compute_subgeometry(b.mesh, cfg.eta);
  b.hash = mesh_hash(b.mesh);
  return b;
}

BoundaryConditions make_bcs(const Mesh& m, const ManufacturedCase& mc,
                            const std::vector<int>& neumann_sides) {
  if (neumann_sides.empty()) return dirichlet_all(m, mc.u);
  auto stress = mc.stress;
  TractionFn t = [stress](const Vec3& x, const Vec3& n) -> Vec3 {
    return stress(x) * n;
  };
  return mixed_box(m, mc.u, t, neumann_sides);
}

double pair_rate(double dof0, double e0, double dof1, double e1, int dim) {
  if (!(e0 > 0.0) || !(e1 > 0.0)) return kNaN;
  double x0 = std::log(dof0) / dim, x1 = std::log(dof1) / dim;
  if (x1 == x0) return kNaN;
  return -(std::log(e1) - std::log(e0)) / (x1 - x0);
}

// Slope over the last (up to) three levels; nan when fewer than two usable.
double tail_fit(const std::vector<LevelResult>& levels,
                double LevelResult::*field, int dim) {
  std::vector<std::pair<double, double>> pts;
  size_t first = levels.size() > 3 ? levels.size() - 3 : 0;
  for (size_t i = first; i < levels.size(); ++i) {
    double e = levels[i].*field;
    if (e > 0.0 && std::isfinite(e))
      pts.emplace_back((double)levels[i].dof, e);
  }
  if (pts.size() < 2) return kNaN;
  return fit_rate(pts, dim);
}

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  std::string s = buf;
  s.erase(std::remove(s.begin(), s.end(), '+'), s.end());
  return s;
}

LevelResult run_case(const StudyConfig& cfg, const MeshBundle& b, int n,
                     Method method, Averaging averaging, double kappa,
                     double alpha) {
  const Mesh& m = b.mesh;
  LevelResult lr;
  lr.level = n;
  lr.dof = (long)m.dim * (long)m.cells.size();
  lr.h = m.max_cell_diameter();
  lr.mesh_hash = b.hash;

  IsotropicField mat = from_indicator(m, kappa, alpha);
  ManufacturedCase mc = make_case(m.dim, kappa, alpha);
  BoundaryConditions bc = make_bcs(m, mc, cfg.neumann_sides);
  DiscOptions opt;
  opt.method = method;
  opt.averaging = averaging;
  opt.weights = cfg.weights;
  opt.neumann_average_term = cfg.neumann_average_term;
  opt.threads = cfg.threads;
  opt.audit = cfg.audit && method != Method::MpfaScalar;
  opt.theta_flag = cfg.theta_flag;

  Discretization disc = discretize_all(m, b.sg, mat, bc, opt);
  Eigen::VectorXd bvals = boundary_values(m, b.sg, disc, bc);
  GlobalSystem sys = assemble(m, disc, mc.body_force, bvals);
  DisplacementField field = solve(sys);
  TractionField tf = face_tractions(m, disc, field, bvals);

  lr.eps_d = displacement_error(m, field, mc);
  lr.eps_pi = stress_error(m, tf, mc);
  AngularMomentum am = angular_momentum(m, tf, mc);
  lr.mean_ang_mom = am.mean_abs;
  lr.ang_mom_diff = am.mean_diff;
  lr.min_theta = opt.audit ? disc.audit.min_theta() : kNaN;
  lr.solve_residual = field.residual;
  lr.rate_d = lr.rate_pi = kNaN;
  return lr;
}

}  // namespace

std::string CurveResult::grid_label() const {
  return family + (dim == 2 ? "-2d" : "-3d");
}

std::string CurveResult::curve_label() const {
  std::ostringstream os;
  os << to_string(method) << "_" << to_string(averaging) << "_" << family
     << dim << "_k" << fmt_g(kappa) << "_a" << fmt_g(alpha) << "_p"
     << fmt_g(perturb);
  return os.str();
}

StudyResult run_study(const StudyConfig& cfg) {
  cfg.validate();
  if (!cfg.mesh_file.empty())
    throw ConfigError("grid.mesh: a study builds its own grid hierarchy");
  if (cfg.levels.empty())
    throw ConfigError("grid.levels: a study needs at least one level");

  StudyResult res;
  res.config = cfg;
  std::map<MeshKey, std::shared_ptr<MeshBundle>> cache;

  for (int dim : cfg.dims)
    for (const auto& family : cfg.families)
      for (double pf : cfg.perturbs)
        for (double kappa : cfg.kappas)
          for (double alpha : cfg.alphas)
            for (Method method : cfg.methods) {
              // Averaging only differentiates the weak-symmetry scheme.
              std::vector<Averaging> avgs =
                  method == Method::MpsaW ? cfg.averagings
                                          : std::vector<Averaging>{
                                                Averaging::Vertex};
              for (Averaging averaging : avgs) {
                CurveResult cur;
                cur.dim = dim;
                cur.family = family;
                cur.method = method;
                cur.averaging = averaging;
                cur.kappa = kappa;
                cur.alpha = alpha;
                cur.perturb = pf;
                cur.seed = cfg.seed;
                const auto& levels = cfg.effective_levels(dim);
                for (size_t li = 0; li < levels.size(); ++li) {
                  const int n = levels[li];
                  const bool frozen = kappa != 1.0;
                  MeshKey key{dim, family, n, pf, frozen};
                  auto it = cache.find(key);
                  if (it == cache.end())
                    it = cache
                             .emplace(key, std::make_shared<MeshBundle>(
                                               make_bundle(cfg, dim, family,
                                                           n, (int)li, pf,
                                                           frozen)))
                             .first;
                  LevelResult lr = run_case(cfg, *it->second, n, method,
                                            averaging, kappa, alpha);
                  if (!cur.levels.empty()) {
                    const LevelResult& pr = cur.levels.back();
                    lr.rate_d = pair_rate((double)pr.dof, pr.eps_d,
                                          (double)lr.dof, lr.eps_d, dim);
                    lr.rate_pi = pair_rate((double)pr.dof, pr.eps_pi,
                                           (double)lr.dof, lr.eps_pi, dim);
                  }
                  cur.levels.push_back(lr);
                }
                cur.rate_d_fit = tail_fit(cur.levels, &LevelResult::eps_d, dim);
                cur.rate_pi_fit =
                    tail_fit(cur.levels, &LevelResult::eps_pi, dim);
                cur.rate_ang_fit =
                    tail_fit(cur.levels, &LevelResult::mean_ang_mom, dim);
                cur.rate_ang_diff_fit =
                    tail_fit(cur.levels, &LevelResult::ang_mom_diff, dim);
                res.curves.push_back(std::move(cur));
              }
            }
  return res;
}

void write_csv(const StudyResult& res, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot write '" + path + "'");
  std::fprintf(f,
               "level,dof,h,eps_d,eps_pi,rate_d,rate_pi,min_theta,"
               "mean_ang_mom,ang_mom_diff,method,averaging,grid,perturb,"
               "kappa,alpha,seed\n");
  for (const auto& cur : res.curves)
    for (const auto& lr : cur.levels)
      std::fprintf(f,
                   "%d,%ld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                   "%s,%s,%s,%.17g,%.17g,%.17g,%" PRIu64 "\n",
                   lr.level, lr.dof, lr.h, lr.eps_d, lr.eps_pi, lr.rate_d,
                   lr.rate_pi, lr.min_theta, lr.mean_ang_mom, lr.ang_mom_diff,
                   to_string(cur.method).c_str(),
                   to_string(cur.averaging).c_str(),
                   cur.grid_label().c_str(), cur.perturb, cur.kappa,
                   cur.alpha, (std::uint64_t)cur.seed);
  std::fclose(f);
}

void write_plot_data(const StudyResult& res, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const struct {
    const char* suffix;
    double LevelResult::*field;
  } series[] = {{"eps_d", &LevelResult::eps_d},
                {"eps_pi", &LevelResult::eps_pi},
                {"ang_mom", &LevelResult::mean_ang_mom},
                {"ang_mom_diff", &LevelResult::ang_mom_diff}};
  for (const auto& cur : res.curves)
    for (const auto& s : series) {
      std::string path = dir + "/" + cur.curve_label() + "_" + s.suffix +
                         ".dat";
      std::FILE* f = std::fopen(path.c_str(), "wb");
      if (!f) throw IoError("cannot write '" + path + "'");
      std::fprintf(f, "# dof^(1/%d)  %s\n", cur.dim, s.suffix);
      for (const auto& lr : cur.levels)
        std::fprintf(f, "%.17g %.17g\n",
                     std::pow((double)lr.dof, 1.0 / cur.dim), lr.*s.field);
      std::fclose(f);
    }
}

void write_mesh_metadata(const StudyResult& res, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot write '" + path + "'");
  std::fprintf(f, "# grid level perturb kappa_contrast_interface seed hash\n");
  std::map<std::string, bool> seen;
  for (const auto& cur : res.curves)
    for (size_t li = 0; li < cur.levels.size(); ++li) {
      const LevelResult& lr = cur.levels[li];
      char line[256];
      std::snprintf(line, sizeof line, "%s %d %.17g %d %" PRIu64 " %016" PRIx64,
                    cur.grid_label().c_str(), lr.level, cur.perturb,
                    cur.kappa != 1.0 ? 1 : 0,
                    cur.seed + (std::uint64_t)li, lr.mesh_hash);
      if (!seen.emplace(line, true).second) continue;
      std::fprintf(f, "%s\n", line);
    }
  std::fclose(f);
}

SolveResult run_solve(const StudyConfig& cfg) {
  cfg.validate();
  const int dim0 = cfg.dims.front();
  const std::string family = cfg.families.front();
  const double pf = cfg.perturbs.front();
  const double kappa = cfg.kappas.front();
  const double alpha = cfg.alphas.front();

  SolveResult res;
  if (!cfg.mesh_file.empty()) {
    res.mesh = read_mesh(cfg.mesh_file);
    res.sg = compute_subgeometry(res.mesh, cfg.eta);
    res.mesh_hash = mesh_hash(res.mesh);
  } else {
    const auto& levels = cfg.effective_levels(dim0);
    int n = cfg.n > 0 ? cfg.n : levels.front();
    auto it = std::find(levels.begin(), levels.end(), n);
    int li = it == levels.end() ? 0 : (int)(it - levels.begin());
    MeshBundle b =
        make_bundle(cfg, dim0, family, n, li, pf, kappa != 1.0);
    res.mesh = std::move(b.mesh);
    res.sg = std::move(b.sg);
    res.mesh_hash = b.hash;
  }
  const Mesh& m = res.mesh;

  IsotropicField mat = from_indicator(m, kappa, alpha);
  ManufacturedCase mc = make_case(m.dim, kappa, alpha);
  BoundaryConditions bc = make_bcs(m, mc, cfg.neumann_sides);
  DiscOptions opt;
  opt.method = cfg.methods.front();
  opt.averaging = cfg.averagings.front();
  opt.weights = cfg.weights;
  opt.neumann_average_term = cfg.neumann_average_term;
  opt.threads = cfg.threads;
  opt.audit = cfg.audit && opt.method != Method::MpfaScalar;
  opt.theta_flag = cfg.theta_flag;

  Discretization disc = discretize_all(m, res.sg, mat, bc, opt);
  Eigen::VectorXd bvals = boundary_values(m, res.sg, disc, bc);
  GlobalSystem sys = assemble(m, disc, mc.body_force, bvals);
  res.field = solve(sys);
  res.tractions = face_tractions(m, disc, res.field, bvals);
  res.eps_d = displacement_error(m, res.field, mc);
  res.eps_pi = stress_error(m, res.tractions, mc);
  AngularMomentum am = angular_momentum(m, res.tractions, mc);
  res.mean_ang_mom = am.mean_abs;
  res.ang_mom_diff = am.mean_diff;
  res.min_theta = opt.audit ? disc.audit.min_theta() : kNaN;
  return res;
}

void write_solve_outputs(const SolveResult& res, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const Mesh& m = res.mesh;
  const int D = m.dim;

  std::string path = dir + "/displacement.txt";
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot write '" + path + "'");
  std::fprintf(f, "# cell displacement at the cell center (%d components)\n",
               D);
  for (size_t c = 0; c < res.field.u.size(); ++c) {
    std::fprintf(f, "%zu", c);
    for (int d = 0; d < D; ++d)
      std::fprintf(f, " %.17g", res.field.u[c][d]);
    std::fprintf(f, "\n");
  }
  std::fclose(f);

  path = dir + "/tractions.txt";
  f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot write '" + path + "'");
  std::fprintf(f,
               "# face total traction, oriented out of the first adjacent "
               "cell (%d components)\n",
               D);
  for (size_t fi = 0; fi < res.tractions.total.size(); ++fi) {
    std::fprintf(f, "%zu", fi);
    for (int d = 0; d < D; ++d)
      std::fprintf(f, " %.17g", res.tractions.total[fi][d]);
    std::fprintf(f, "\n");
  }
  std::fclose(f);

  path = dir + "/summary.txt";
  f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot write '" + path + "'");
  std::fprintf(f, "cells = %zu\n", m.cells.size());
  std::fprintf(f, "faces = %zu\n", m.faces.size());
  std::fprintf(f, "dof = %ld\n", (long)D * (long)m.cells.size());
  std::fprintf(f, "eps_d = %.17g\n", res.eps_d);
  std::fprintf(f, "eps_pi = %.17g\n", res.eps_pi);
  std::fprintf(f, "mean_ang_mom = %.17g\n", res.mean_ang_mom);
  std::fprintf(f, "ang_mom_diff = %.17g\n", res.ang_mom_diff);
  std::fprintf(f, "solve_residual = %.17g\n", res.field.residual);
  std::fprintf(f, "min_theta = %.17g\n", res.min_theta);
  std::fprintf(f, "mesh_hash = %016" PRIx64 "\n", res.mesh_hash);
  std::fclose(f);
}

AuditResult run_audit(const StudyConfig& cfg) {
  cfg.validate();
  const int dim0 = cfg.dims.front();
  const std::string family = cfg.families.front();
  const double pf = cfg.perturbs.front();
  const double kappa = cfg.kappas.front();
  const double alpha = cfg.alphas.front();

  std::vector<int> levels;
  if (!cfg.mesh_file.empty() || cfg.n > 0)
    levels = {cfg.n};  // single mesh (value unused in file mode)
  else
    levels = cfg.effective_levels(dim0);

  AuditResult res;
  for (size_t li = 0; li < levels.size(); ++li) {
    Mesh mesh;
    SubGeometry sg;
    if (!cfg.mesh_file.empty()) {
      mesh = read_mesh(cfg.mesh_file);
      sg = compute_subgeometry(mesh, cfg.eta);
    } else {
      MeshBundle b = make_bundle(cfg, dim0, family, levels[li], (int)li, pf,
                                 kappa != 1.0);
      mesh = std::move(b.mesh);
      sg = std::move(b.sg);
    }
    IsotropicField mat = from_indicator(mesh, kappa, alpha);
    ManufacturedCase mc = make_case(mesh.dim, kappa, alpha);
    BoundaryConditions bc = make_bcs(mesh, mc, cfg.neumann_sides);
    DiscOptions opt;
    opt.method = cfg.methods.front();
    opt.averaging = cfg.averagings.front();
    opt.weights = cfg.weights;
    opt.neumann_average_term = cfg.neumann_average_term;
    opt.threads = cfg.threads;
    opt.audit = true;
    opt.theta_flag = cfg.theta_flag;
    Discretization disc = discretize_all(mesh, sg, mat, bc, opt);

    AuditLevel al;
    al.level = levels[li];
    al.vertices = (long)disc.audit.entries.size();
    al.min_theta = disc.audit.min_theta();
    al.p10 = disc.audit.percentile_theta(0.10);
    al.p50 = disc.audit.percentile_theta(0.50);
    al.flagged = disc.audit.flagged();
    for (const auto& e : disc.audit.entries)
      if (e.skipped) ++al.skipped;
    res.levels.push_back(al);
  }
  return res;
}

std::string mesh_info_text(const Mesh& m, const std::string& eta) {
  SubGeometry sg = compute_subgeometry(m, eta);
  double vol = 0.0, closed = 0.0, cell_part = 0.0, face_part = 0.0;
  for (size_t c = 0; c < m.cells.size(); ++c) {
    vol += m.cells[c].volume;
    Vec3 s = Vec3::Zero();
    for (int fi : m.cells[c].faces) {
      const Face& fc = m.faces[fi];
      double sgn = fc.cells[0] == (int)c ? 1.0 : -1.0;
      s += sgn * fc.area * fc.normal;
    }
    closed = std::max(closed, s.norm());
    cell_part = std::max(
        cell_part, std::abs(sg.cell_part_sum((int)c) - m.cells[c].volume));
  }
  for (size_t fi = 0; fi < m.faces.size(); ++fi)
    face_part = std::max(
        face_part, std::abs(sg.face_part_sum((int)fi) - m.faces[fi].area));

  std::ostringstream os;
  char buf[128];
  os << "dim " << m.dim << "\n";
  os << "vertices " << m.verts.size() << "\n";
  os << "cells " << m.cells.size() << "\n";
  os << "faces " << m.faces.size() << "\n";
  os << "boundary_faces " << m.n_boundary_faces() << "\n";
  if (m.dim == 3) os << "edges " << m.edges.size() << "\n";
  os << "all_simplex " << (m.all_simplex() ? "yes" : "no") << "\n";
  std::snprintf(buf, sizeof buf, "volume %.17g\n", vol);
  os << buf;
  std::snprintf(buf, sizeof buf, "max_cell_diameter %.17g\n",
                m.max_cell_diameter());
  os << buf;
  std::snprintf(buf, sizeof buf, "max_closed_surface_defect %.3g\n", closed);
  os << buf;
  std::snprintf(buf, sizeof buf, "max_subcell_partition_defect %.3g\n",
                cell_part);
  os << buf;
  std::snprintf(buf, sizeof buf, "max_subface_partition_defect %.3g\n",
                face_part);
  os << buf;
  std::snprintf(buf, sizeof buf, "eta %.17g\n", sg.eta);
  os << buf;
  std::snprintf(buf, sizeof buf, "hash %016" PRIx64 "\n", mesh_hash(m));
  os << buf;
  return os.str();
}

}  // namespace mpsaw
