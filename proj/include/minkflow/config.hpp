#pragma once

#include <map>
#include <string>

#include "minkflow/flow.hpp"

namespace minkflow {

// Run configuration assembled from defaults, an optional config file and
// command-line flags (flags win). MINKFLOW_OUT overrides the output directory.
struct RunConfig {
  int N = 256;
  double q = 2.0;
  double p = -1.0;
  bool even_mode = true;
  std::string init = "disk:1";
  std::string f = "const:1";
  double dt0 = 1e-3;
  double t_max = 10.0;
  double tol_residual = 1e-3;
  double target_size = 0.04;
  double eps_reg = -1.0;
  double solver_tol = 1e-10;
  int solver_max_iter = 200;
  bool rescale = true;
  bool symmetrize = true;
  std::string recovery = "flux";  // flux | average
  std::string out_dir = "out";
  long seed = 0;  // reserved; runs are deterministic

  ProblemSpec to_problem_spec() const;
};

// Flat key=value file (lines, '#' comments) or a flat JSON object.
std::map<std::string, std::string> load_config_file(const std::string& path);

}  // namespace minkflow
