#include "minkflow/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "minkflow/errors.hpp"
#include "minkflow/io.hpp"

namespace minkflow {

ProblemSpec RunConfig::to_problem_spec() const {
  ProblemSpec spec;
  spec.n = 2;
  spec.q = q;
  spec.p = p;
  spec.even_mode = even_mode;
  spec.N = N;
  spec.target_size = target_size;
  spec.f = parse_f_spec(f, N);
  spec.flow.dt0 = dt0;
  spec.flow.t_max = t_max;
  spec.flow.tol_residual = tol_residual;
  spec.flow.rescale = rescale;
  spec.flow.symmetrize = symmetrize;
  spec.solver.eps_reg = eps_reg;
  spec.solver.tol = solver_tol;
  spec.solver.max_iter = solver_max_iter;
  if (recovery == "flux")
    spec.solver.recovery = GradientRecovery::kFlux;
  else if (recovery == "average")
    spec.solver.recovery = GradientRecovery::kAverage;
  else
    throw ConfigError("recovery must be 'flux' or 'average'");
  spec.validate();
  return spec;
}

std::map<std::string, std::string> load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::map<std::string, std::string> kv;
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    nlohmann::json j;
    try {
      in >> j;
    } catch (const std::exception& e) {
      throw ConfigError(std::string("bad JSON config: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("JSON config must be a flat object");
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.value().is_string())
        kv[it.key()] = it.value().get<std::string>();
      else
        kv[it.key()] = it.value().dump();
    }
    return kv;
  }
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    // trim
    auto ltrim = line.find_first_not_of(" \t\r");
    if (ltrim == std::string::npos) continue;
    auto rtrim = line.find_last_not_of(" \t\r");
    line = line.substr(ltrim, rtrim - ltrim + 1);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line is not key=value: '" + line + "'");
    auto trim = [](std::string s) {
      auto a = s.find_first_not_of(" \t");
      auto b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

}  // namespace minkflow
