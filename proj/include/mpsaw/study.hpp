#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "mpsaw/config.hpp"
#include "mpsaw/mesh.hpp"
#include "mpsaw/system.hpp"

namespace mpsaw {

struct LevelResult {
  int level = 0;  // cells per axis
  long dof = 0;
  double h = 0;
  double eps_d = 0, eps_pi = 0;
  double rate_d = 0, rate_pi = 0;  // pairwise vs previous level (nan on first)
  double min_theta = 0;            // nan when the audit is off
  double mean_ang_mom = 0, ang_mom_diff = 0;
  double solve_residual = 0;
  std::uint64_t mesh_hash = 0;
};

struct CurveResult {
  int dim = 2;
  std::string family;
  Method method = Method::MpsaW;
  Averaging averaging = Averaging::Vertex;
  double kappa = 1, alpha = 1, perturb = 0;
  std::uint64_t seed = 0;
  std::vector<LevelResult> levels;
  // Least-squares slopes over the last (up to) three levels.
  double rate_d_fit = 0, rate_pi_fit = 0;
  double rate_ang_fit = 0, rate_ang_diff_fit = 0;

  std::string grid_label() const;  // e.g. "cartesian-2d"
  std::string curve_label() const; // filename-safe curve id
};

struct StudyResult {
  StudyConfig config;
  std::vector<CurveResult> curves;
};

StudyResult run_study(const StudyConfig& cfg);
void write_csv(const StudyResult& res, const std::string& path);
void write_plot_data(const StudyResult& res, const std::string& dir);
void write_mesh_metadata(const StudyResult& res, const std::string& path);

// Single solve of the manufactured problem (or a mesh from file) with the
// first entry of every swept list.
struct SolveResult {
  Mesh mesh;
  SubGeometry sg;
  DisplacementField field;
  TractionField tractions;
  double eps_d = 0, eps_pi = 0;
  double mean_ang_mom = 0, ang_mom_diff = 0;
  double min_theta = 0;
  std::uint64_t mesh_hash = 0;
};

SolveResult run_solve(const StudyConfig& cfg);
void write_solve_outputs(const SolveResult& res, const std::string& dir);

struct AuditLevel {
  int level = 0;
  long vertices = 0;
  double min_theta = 0, p10 = 0, p50 = 0;
  long flagged = 0, skipped = 0;
};

struct AuditResult {
  std::vector<AuditLevel> levels;
};

AuditResult run_audit(const StudyConfig& cfg);

std::string mesh_info_text(const Mesh& m, const std::string& eta = "auto");

}  // namespace mpsaw
