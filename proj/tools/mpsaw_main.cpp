#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "mpsaw/config.hpp"
#include "mpsaw/errors.hpp"
#include "mpsaw/study.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string preset_name;
  std::string out;
  std::string mesh;
  int n = 0;
  long seed = -1;
  int threads = -1;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool needs_source) {
  auto* cfgopt =
      cmd->add_option("--config", a.config_path, "configuration file");
  auto* preopt = cmd->add_option("--preset", a.preset_name,
                                 "built-in configuration (fig3..fig9)");
  cfgopt->excludes(preopt);
  if (needs_source) {
    // one of the two must be given
    cmd->callback([&a, cmd]() {
      if (a.config_path.empty() && a.preset_name.empty())
        throw CLI::ValidationError(cmd->get_name(),
                                   "needs --config or --preset");
    });
  }
  cmd->add_option("--out", a.out, "output directory (default from config)");
  cmd->add_option("--seed", a.seed, "override the configured seed");
  cmd->add_option("--threads", a.threads,
                  "worker threads for the local solves (0 = all cores)");
}

mpsaw::StudyConfig resolve_config(const CommonArgs& a) {
  mpsaw::StudyConfig cfg;
  if (!a.preset_name.empty())
    cfg = mpsaw::preset(a.preset_name);
  else if (!a.config_path.empty())
    cfg = mpsaw::load_config(a.config_path);
  if (!a.out.empty()) cfg.out = a.out;
  if (!a.mesh.empty()) cfg.mesh_file = a.mesh;
  if (a.n > 0) cfg.n = a.n;
  if (a.seed >= 0) cfg.seed = (std::uint64_t)a.seed;
  if (a.threads >= 0) cfg.threads = a.threads;
  return cfg;
}

int cmd_study(const CommonArgs& a) {
  mpsaw::StudyConfig cfg = resolve_config(a);
  mpsaw::StudyResult res = mpsaw::run_study(cfg);
  std::filesystem::create_directories(cfg.out);
  mpsaw::write_csv(res, cfg.out + "/study.csv");
  mpsaw::write_plot_data(res, cfg.out + "/plots");
  mpsaw::write_mesh_metadata(res, cfg.out + "/meshes.txt");
  for (const auto& cur : res.curves) {
    std::printf("%-52s", cur.curve_label().c_str());
    std::printf(" rate_d %6.3f  rate_pi %6.3f", cur.rate_d_fit,
                cur.rate_pi_fit);
    const auto& last = cur.levels.back();
    std::printf("  eps_d %.3e  eps_pi %.3e\n", last.eps_d, last.eps_pi);
  }
  std::printf("wrote %s/study.csv (%zu curves)\n", cfg.out.c_str(),
              res.curves.size());
  return 0;
}

int cmd_solve(const CommonArgs& a) {
  mpsaw::StudyConfig cfg = resolve_config(a);
  mpsaw::SolveResult res = mpsaw::run_solve(cfg);
  mpsaw::write_solve_outputs(res, cfg.out);
  std::printf("cells %zu  eps_d %.6e  eps_pi %.6e  residual %.3e\n",
              res.mesh.cells.size(), res.eps_d, res.eps_pi,
              res.field.residual);
  std::printf("wrote %s/{displacement,tractions,summary}.txt\n",
              cfg.out.c_str());
  return 0;
}

int cmd_audit(const CommonArgs& a) {
  mpsaw::StudyConfig cfg = resolve_config(a);
  mpsaw::AuditResult res = mpsaw::run_audit(cfg);
  std::printf("%8s %10s %12s %12s %12s %8s %8s\n", "level", "vertices",
              "min_theta", "p10_theta", "p50_theta", "flagged", "skipped");
  for (const auto& al : res.levels)
    std::printf("%8d %10ld %12.4e %12.4e %12.4e %8ld %8ld\n", al.level,
                al.vertices, al.min_theta, al.p10, al.p50, al.flagged,
                al.skipped);
  return 0;
}

int cmd_mesh_info(const CommonArgs& a, const std::string& eta) {
  mpsaw::Mesh m;
  if (!a.mesh.empty()) {
    m = mpsaw::read_mesh(a.mesh);
  } else {
    mpsaw::StudyConfig cfg = resolve_config(a);
    if (!cfg.mesh_file.empty()) {
      m = mpsaw::read_mesh(cfg.mesh_file);
    } else {
      int n = cfg.n > 0 ? cfg.n
                        : (cfg.levels.empty() ? 0
                                              : cfg.effective_levels(
                                                    cfg.dims.front())
                                                    .front());
      if (n <= 0)
        throw mpsaw::ConfigError("mesh-info needs --mesh, grid.mesh or a level");
      const std::string family = cfg.families.front();
      const int dim = cfg.dims.front();
      m = family == "cartesian" ? mpsaw::build_cartesian(dim, n)
                                : mpsaw::build_simplex(dim, n);
      if (cfg.perturbs.front() > 0.0) {
        std::vector<mpsaw::FrozenPlane> planes;
        if (cfg.kappas.front() != 1.0)
          for (int ax = 0; ax < dim; ++ax) planes.push_back({ax, 0.5});
        m = mpsaw::perturb(m, cfg.perturbs.front(), cfg.seed, planes);
      }
    }
  }
  std::fputs(mpsaw::mesh_info_text(m, eta).c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cell-centered finite-volume elasticity"};
  app.require_subcommand(1);

  CommonArgs study_args, solve_args, audit_args, info_args;
  std::string info_eta = "auto";

  CLI::App* study = app.add_subcommand(
      "study", "run a grid-refinement study and write csv + plot data");
  add_common(study, study_args, true);

  CLI::App* solve = app.add_subcommand(
      "solve", "solve one case and write displacement/traction fields");
  add_common(solve, solve_args, true);
  solve->add_option("--mesh", solve_args.mesh, "mesh file to solve on");
  solve->add_option("-n,--cells", solve_args.n, "cells per axis");

  CLI::App* audit = app.add_subcommand(
      "audit", "report the local coercivity measure per mesh level");
  add_common(audit, audit_args, true);
  audit->add_option("--mesh", audit_args.mesh, "mesh file to audit");
  audit->add_option("-n,--cells", audit_args.n, "cells per axis");

  CLI::App* info = app.add_subcommand(
      "mesh-info", "print mesh counts, measures and consistency checks");
  add_common(info, info_args, false);
  info->add_option("--mesh", info_args.mesh, "mesh file to inspect");
  info->add_option("-n,--cells", info_args.n, "cells per axis");
  info->add_option("--eta", info_eta, "continuity-point parameter or 'auto'");

  try {
    app.parse(argc, argv);
    if (study->parsed()) return cmd_study(study_args);
    if (solve->parsed()) return cmd_solve(solve_args);
    if (audit->parsed()) return cmd_audit(audit_args);
    if (info->parsed()) return cmd_mesh_info(info_args, info_eta);
    return 0;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const mpsaw::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const mpsaw::NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const mpsaw::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
