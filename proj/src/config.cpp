#include "mpsaw/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "mpsaw/errors.hpp"

namespace mpsaw {
namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : v) {
    if (c == ' ' || c == '\t' || c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

double to_double(const std::string& tok, const std::string& key) {
  try {
    size_t pos = 0;
    double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    bad(key, "expected a number, got '" + tok + "'");
  }
}

long long to_int(const std::string& tok, const std::string& key) {
  try {
    size_t pos = 0;
    long long v = std::stoll(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    bad(key, "expected an integer, got '" + tok + "'");
  }
}

bool to_bool(const std::string& tok, const std::string& key) {
  std::string t = lower(tok);
  if (t == "true" || t == "1" || t == "on" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "off" || t == "no") return false;
  bad(key, "expected a boolean, got '" + tok + "'");
}

Method to_method(const std::string& tok, const std::string& key) {
  std::string t = lower(tok);
  if (t == "mpsa-w") return Method::MpsaW;
  if (t == "mpsa-o-simplex") return Method::MpsaOSimplex;
  if (t == "mpfa-scalar") return Method::MpfaScalar;
  bad(key, "unknown method '" + tok + "'");
}

Averaging to_averaging(const std::string& tok, const std::string& key) {
  std::string t = lower(tok);
  if (t == "vertex") return Averaging::Vertex;
  if (t == "edge") return Averaging::Edge;
  bad(key, "unknown averaging '" + tok + "'");
}

}  // namespace

void StudyConfig::validate() const {
  if (dims.empty()) bad("grid.dim", "must not be empty");
  for (int d : dims)
    if (d != 2 && d != 3) bad("grid.dim", "must be 2 or 3");
  if (families.empty()) bad("grid.family", "must not be empty");
  for (const auto& f : families)
    if (f != "cartesian" && f != "simplex")
      bad("grid.family", "must be 'cartesian' or 'simplex', got '" + f + "'");
  if (levels.empty() && n == 0 && mesh_file.empty())
    bad("grid.levels", "no levels, no n, no mesh given");
  auto check_levels = [](const std::vector<int>& ls, const char* key) {
    for (size_t i = 0; i < ls.size(); ++i) {
      if (ls[i] < 1) bad(key, "levels must be >= 1");
      if (i > 0 && ls[i] <= ls[i - 1])
        bad(key, "levels must be strictly increasing");
    }
  };
  check_levels(levels, "grid.levels");
  check_levels(levels_3d, "grid.levels_3d");
  if (n < 0) bad("grid.n", "must be >= 1");
  for (double p : perturbs)
    if (!(p >= 0.0 && p < 0.5))
      bad("grid.perturb", "must lie in [0, 0.5)");
  if (perturbs.empty()) bad("grid.perturb", "must not be empty");
  for (double k : kappas)
    if (!(k > 0.0)) bad("material.kappa", "must be positive");
  if (kappas.empty()) bad("material.kappa", "must not be empty");
  for (double a : alphas)
    if (!(a >= 0.0)) bad("material.alpha", "must be non-negative");
  if (alphas.empty()) bad("material.alpha", "must not be empty");
  if (methods.empty()) bad("scheme.method", "must not be empty");
  if (averagings.empty()) bad("scheme.averaging", "must not be empty");
  for (Averaging a : averagings)
    if (a == Averaging::Edge)
      for (int d : dims)
        if (d != 3) bad("scheme.averaging", "edge averaging requires dim = 3");
  for (Method m : methods)
    if (m == Method::MpsaOSimplex)
      for (const auto& f : families)
        if (f != "simplex")
          bad("scheme.method", "mpsa-o-simplex requires simplex grids");
  if (eta != "auto") {
    double e = to_double(eta, "scheme.eta");
    if (!(e >= 0.0 && e < 1.0)) bad("scheme.eta", "must lie in [0, 1)");
  }
  int max_sides = 2 * *std::min_element(dims.begin(), dims.end());
  if ((int)neumann_sides.size() >= max_sides)
    bad("bc.neumann_sides", "at least one side must stay Dirichlet");
  for (size_t i = 0; i < neumann_sides.size(); ++i) {
    if (neumann_sides[i] < 0 || neumann_sides[i] >= max_sides)
      bad("bc.neumann_sides", "side index out of range");
    for (size_t j = 0; j < i; ++j)
      if (neumann_sides[i] == neumann_sides[j])
        bad("bc.neumann_sides", "duplicate side index");
  }
  if (threads < 0) bad("run.threads", "must be >= 0");
  if (!(theta_flag > 0.0) || !std::isfinite(theta_flag))
    bad("run.theta_flag", "must be positive and finite");
  if (out.empty()) bad("run.out", "must not be empty");
}

StudyConfig parse_config_text(const std::string& text,
                              const std::string& name) {
  StudyConfig cfg;
  cfg.perturbs.clear();
  cfg.kappas.clear();
  cfg.alphas.clear();
  cfg.methods.clear();
  cfg.averagings.clear();
  cfg.dims.clear();
  cfg.families.clear();

  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(is, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::string where = name + ":" + std::to_string(lineno);
    if (!header_seen) {
      if (line != "mpsaw-config 1")
        bad(where, "expected header 'mpsaw-config 1', got '" + line + "'");
      header_seen = true;
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') bad(where, "unterminated section header");
      section = lower(trim(line.substr(1, line.size() - 2)));
      if (section != "grid" && section != "material" && section != "scheme" &&
          section != "bc" && section != "run")
        bad(where, "unknown section '" + section + "'");
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos) bad(where, "expected 'key = value'");
    std::string key = lower(trim(line.substr(0, eq)));
    std::string value = trim(line.substr(eq + 1));
    if (section.empty()) bad(where, "key '" + key + "' outside any section");
    std::string full = section + "." + key;
    auto toks = split_list(value);
    if (toks.empty()) bad(full, "empty value");

    if (full == "grid.dim") {
      for (auto& t : toks) cfg.dims.push_back((int)to_int(t, full));
    } else if (full == "grid.family") {
      for (auto& t : toks) cfg.families.push_back(lower(t));
    } else if (full == "grid.levels") {
      for (auto& t : toks) cfg.levels.push_back((int)to_int(t, full));
    } else if (full == "grid.levels_3d") {
      for (auto& t : toks) cfg.levels_3d.push_back((int)to_int(t, full));
    } else if (full == "grid.n") {
      cfg.n = (int)to_int(value, full);
    } else if (full == "grid.perturb") {
      for (auto& t : toks) cfg.perturbs.push_back(to_double(t, full));
    } else if (full == "grid.seed") {
      cfg.seed = (std::uint64_t)to_int(value, full);
    } else if (full == "grid.mesh") {
      cfg.mesh_file = value;
    } else if (full == "material.kappa") {
      for (auto& t : toks) cfg.kappas.push_back(to_double(t, full));
    } else if (full == "material.alpha") {
      for (auto& t : toks) cfg.alphas.push_back(to_double(t, full));
    } else if (full == "scheme.method") {
      for (auto& t : toks) cfg.methods.push_back(to_method(t, full));
    } else if (full == "scheme.averaging") {
      for (auto& t : toks) cfg.averagings.push_back(to_averaging(t, full));
    } else if (full == "scheme.weights") {
      std::string w = lower(value);
      if (w == "volume")
        cfg.weights = AvgWeights::Volume;
      else if (w == "uniform")
        cfg.weights = AvgWeights::Uniform;
      else
        bad(full, "unknown weights '" + value + "'");
    } else if (full == "scheme.eta") {
      cfg.eta = lower(value);
    } else if (full == "scheme.neumann_average_term") {
      cfg.neumann_average_term = to_bool(value, full);
    } else if (full == "bc.neumann_sides") {
      for (auto& t : toks) cfg.neumann_sides.push_back((int)to_int(t, full));
    } else if (full == "run.threads") {
      cfg.threads = (int)to_int(value, full);
    } else if (full == "run.audit") {
      cfg.audit = to_bool(value, full);
    } else if (full == "run.out") {
      cfg.out = value;
    } else if (full == "run.theta_flag") {
      cfg.theta_flag = to_double(value, full);
    } else {
      bad(where, "unknown key '" + full + "'");
    }
  }
  if (!header_seen) bad(name, "empty config (missing 'mpsaw-config 1' header)");

  if (cfg.dims.empty()) cfg.dims = {2};
  if (cfg.families.empty()) cfg.families = {"cartesian"};
  if (cfg.perturbs.empty()) cfg.perturbs = {0.0};
  if (cfg.kappas.empty()) cfg.kappas = {1.0};
  if (cfg.alphas.empty()) cfg.alphas = {1.0};
  if (cfg.methods.empty()) cfg.methods = {Method::MpsaW};
  if (cfg.averagings.empty()) cfg.averagings = {Averaging::Vertex};
  cfg.validate();
  return cfg;
}

StudyConfig load_config(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw IoError("cannot open config file '" + path + "'");
  std::string text;
  char buf[4096];
  size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) text.append(buf, got);
  std::fclose(f);
  return parse_config_text(text, path);
}

namespace {

const std::map<std::string, const char*>& preset_map() {
  static const std::map<std::string, const char*> presets = {
      {"fig3", R"(mpsaw-config 1
# 2D Cartesian convergence: smooth test field, homogeneous and high-contrast
# coefficients, regular and randomly perturbed grids.
[grid]
dim = 2
family = cartesian
levels = 8 16 32 64
perturb = 0 0.3
seed = 42
[material]
kappa = 1 1e6
alpha = 1
[scheme]
method = mpsa-w
averaging = vertex
[run]
audit = true
)"},
      {"fig4", R"(mpsaw-config 1
# 3D Cartesian convergence with both vertex- and edge-wise averaging.
[grid]
dim = 3
family = cartesian
levels = 4 8 16
perturb = 0 0.3
seed = 42
[material]
kappa = 1 1e6
alpha = 1
[scheme]
method = mpsa-w
averaging = vertex edge
[run]
audit = true
)"},
      {"fig5", R"(mpsaw-config 1
# 2D triangular convergence.
[grid]
dim = 2
family = simplex
levels = 8 16 32 64
perturb = 0 0.3
seed = 42
[material]
kappa = 1 1e6
alpha = 1
[scheme]
method = mpsa-w
averaging = vertex
[run]
audit = true
)"},
      {"fig6", R"(mpsaw-config 1
# 3D tetrahedral convergence with both averaging variants.
[grid]
dim = 3
family = simplex
levels = 4 8 12
perturb = 0 0.3
seed = 42
[material]
kappa = 1 1e6
alpha = 1
[scheme]
method = mpsa-w
averaging = vertex edge
[run]
audit = true
)"},
      {"fig7", R"(mpsaw-config 1
# Near-incompressible robustness on 3D Cartesian grids.
[grid]
dim = 3
family = cartesian
levels = 4 8 16
perturb = 0 0.3
seed = 42
[material]
kappa = 1
alpha = 1e2 1e3 1e4
[scheme]
method = mpsa-w
averaging = vertex edge
[run]
audit = true
)"},
      {"fig8", R"(mpsaw-config 1
# Near-incompressible robustness on 3D tetrahedral grids.
[grid]
dim = 3
family = simplex
levels = 4 8 12
perturb = 0 0.3
seed = 42
[material]
kappa = 1
alpha = 1e2 1e3 1e4
[scheme]
method = mpsa-w
averaging = vertex edge
[run]
audit = true
)"},
      {"fig9", R"(mpsaw-config 1
# Angular-momentum balance of the reconstructed tractions on all four grid
# families (homogeneous material, regular grids).
[grid]
dim = 2 3
family = cartesian simplex
levels = 8 16 32 64
levels_3d = 4 8 12
perturb = 0
seed = 42
[material]
kappa = 1
alpha = 1
[scheme]
method = mpsa-w
averaging = vertex
[run]
audit = false
)"},
  };
  return presets;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& kv : preset_map()) v.push_back(kv.first);
    return v;
  }();
  return names;
}

std::string preset_text(const std::string& name) {
  auto it = preset_map().find(name);
  if (it == preset_map().end()) {
    std::string msg = "unknown preset '" + name + "' (have";
    for (const auto& n : preset_names()) msg += " " + n;
    throw ConfigError(msg + ")");
  }
  return it->second;
}

StudyConfig preset(const std::string& name) {
  return parse_config_text(preset_text(name), "preset:" + name);
}

}  // namespace mpsaw
