#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "mpsaw/discretize.hpp"

namespace mpsaw {

// Parameter sweep for a study: the cross product of dims x families x
// perturbations x kappas x alphas x methods x averagings, every curve run on
// the same meshes (per dim/family/level/perturbation). Single-valued lists
// describe plain runs. Parsed from versioned key-value text (see README).
struct StudyConfig {
  std::vector<int> dims = {2};
  std::vector<std::string> families = {"cartesian"};
  std::vector<int> levels;     // cells per axis, strictly increasing
  std::vector<int> levels_3d;  // optional override for dim-3 curves
  std::vector<double> perturbs = {0.0};
  std::uint64_t seed = 1;
  std::vector<Method> methods = {Method::MpsaW};
  std::vector<Averaging> averagings = {Averaging::Vertex};
  AvgWeights weights = AvgWeights::Volume;
  std::string eta = "auto";
  std::vector<double> kappas = {1.0};
  std::vector<double> alphas = {1.0};
  std::vector<int> neumann_sides;  // axis*2 + (low:0 / high:1)
  int threads = 0;
  bool audit = true;
  bool neumann_average_term = true;
  double theta_flag = 1e-8;
  std::string out = "out";
  std::string mesh_file;  // single-level commands may read a mesh instead
  int n = 0;              // single-level commands: cells per axis

  const std::vector<int>& effective_levels(int dim) const {
    return (dim == 3 && !levels_3d.empty()) ? levels_3d : levels;
  }
  void validate() const;  // throws ConfigError naming the offending key
};

StudyConfig parse_config_text(const std::string& text,
                              const std::string& name = "<string>");
StudyConfig load_config(const std::string& path);

const std::vector<std::string>& preset_names();
std::string preset_text(const std::string& name);
StudyConfig preset(const std::string& name);

}  // namespace mpsaw
