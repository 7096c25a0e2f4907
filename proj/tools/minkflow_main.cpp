#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "minkflow/config.hpp"
#include "minkflow/errors.hpp"
#include "minkflow/flow.hpp"
#include "minkflow/io.hpp"
#include "minkflow/measures.hpp"
#include "minkflow/oracles.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace minkflow;

namespace {

void add_common(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--grid", cfg.N, "angular grid size N");
  cmd->add_option("--q", cfg.q, "torsion exponent, q > 1");
  cmd->add_option("--p", cfg.p, "dual exponent, p != 0, p < 2");
  cmd->add_flag("--even,!--no-even", cfg.even_mode, "enforce origin symmetry");
  cmd->add_option("--target-size", cfg.target_size, "mesh target size");
  cmd->add_option("--eps-reg", cfg.eps_reg, "q-Laplace regularization");
  cmd->add_option("--solver-tol", cfg.solver_tol, "Picard energy tolerance");
  cmd->add_option("--solver-max-iter", cfg.solver_max_iter, "Picard iteration cap");
  cmd->add_option("--recovery", cfg.recovery, "boundary gradient recovery: flux|average");
}

// Config file is applied by injecting key=value pairs as flags before the
// user's own flags, so explicit flags win.
std::vector<std::string> with_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string cfg_path;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) cfg_path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) cfg_path = args[i].substr(9);
  }
  if (cfg_path.empty()) return args;
  auto kv = load_config_file(cfg_path);
  std::vector<std::string> out;
  if (!args.empty()) out.push_back(args[0]);  // subcommand first
  for (const auto& [k, v] : kv) out.push_back("--" + k + "=" + v);
  for (size_t i = args.empty() ? 0 : 1; i < args.size(); ++i) {
    if (args[i] == "--config") { ++i; continue; }
    if (args[i].rfind("--config=", 0) == 0) continue;
    out.push_back(args[i]);
  }
  return out;
}

TorsionOptions solver_options(const RunConfig& cfg) {
  TorsionOptions opts;
  opts.eps_reg = cfg.eps_reg;
  opts.tol = cfg.solver_tol;
  opts.max_iter = cfg.solver_max_iter;
  opts.recovery =
      cfg.recovery == "average" ? GradientRecovery::kAverage : GradientRecovery::kFlux;
  return opts;
}

int cmd_run(const RunConfig& cfg, bool dump_mesh) {
  ProblemSpec spec = cfg.to_problem_spec();
  SupportFn initial = parse_init_spec(cfg.init, cfg.N);

  std::string out_dir = cfg.out_dir;
  if (const char* env = std::getenv("MINKFLOW_OUT")) out_dir = env;
  fs::create_directories(out_dir);

  RunResult res = run_flow(spec, initial);

  write_timeseries_csv(out_dir + "/timeseries.csv", res.rows);
  write_body_csv(out_dir + "/final_body.csv", res.final_state.body.support);
  if (dump_mesh)
    write_mesh_csv(out_dir + "/mesh_vertices.csv", out_dir + "/mesh_triangles.csv",
                   res.final_state.torsion.mesh);

  json summary;
  summary["status"] = res.status == FlowStatus::kConverged  ? "Converged"
                      : res.status == FlowStatus::kTimedOut ? "TimedOut"
                                                            : "Aborted";
  summary["steps"] = res.steps;
  summary["rejected_steps"] = res.rejected_steps;
  summary["phi_violations"] = res.phi_violations;
  summary["qtilde_drift_per_unit_time"] = res.qtilde_drift_per_unit_time;
  summary["final_residual"] = res.final_state.residual;
  summary["wall_time_seconds"] = res.wall_seconds;
  summary["t_final"] = res.final_state.t;
  summary["lambda_final"] = res.final_state.lambda;
  summary["qtilde_final"] = res.final_state.Q_tilde;
  summary["phi_final"] = res.final_state.Phi;
  summary["max_even_gap"] = res.max_even_gap;
  if (!res.abort_reason.empty()) summary["abort_reason"] = res.abort_reason;
  std::ofstream(out_dir + "/summary.json") << summary.dump(2) << "\n";
  std::cout << summary.dump(2) << "\n";

  switch (res.status) {
    case FlowStatus::kConverged: return 0;
    case FlowStatus::kTimedOut: return 2;
    case FlowStatus::kAborted: return 3;
  }
  return 3;
}

int cmd_measure(const RunConfig& cfg, const std::string& body_path,
                const std::vector<std::string>& arcs, const std::string& densities_csv) {
  SupportFn s = body_path.empty() ? parse_init_spec(cfg.init, cfg.N)
                                  : read_body_csv(body_path);
  ConvexBody body = build_body(s);
  TorsionSolution sol = solve_torsion(body, cfg.q, cfg.target_size, solver_options(cfg));
  DualMeasureDensity m = dual_measure(body, sol, cfg.p);

  json out;
  out["p"] = cfg.p;
  out["q"] = cfg.q;
  out["n"] = 2;
  out["total"] = m.total_v;
  out["total_x"] = m.total_x;
  out["gap"] = m.gap();
  out["T_tilde"] = sol.T_tilde;
  out["T_tilde_boundary"] = sol.T_tilde_boundary;
  out["arcs"] = json::array();
  for (const auto& spec : arcs) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw ConfigError("arc must be lo:hi radians");
    const double lo = std::stod(spec.substr(0, colon));
    const double hi = std::stod(spec.substr(colon + 1));
    ArcMeasure a = measure_of_arc(body, sol, cfg.p, lo, hi);
    out["arcs"].push_back({{"lo", a.lo},
                           {"hi", a.hi},
                           {"value_v", a.value_v},
                           {"value_x", a.value_x},
                           {"gap", a.gap()}});
  }
  if (!densities_csv.empty()) {
    std::ofstream d(densities_csv);
    d << "angle,density_v,density_x\n";
    for (int j = 0; j < body.N; ++j)
      d << body.theta[j] << ',' << m.density_v[j] << ',' << m.density_x[j] << "\n";
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_variation(const RunConfig& cfg, const std::string& target,
                  const std::string& direction_spec, double s) {
  SupportFn base = parse_init_spec(cfg.init, cfg.N);
  std::vector<double> dir = parse_f_spec(direction_spec, cfg.N);
  RefereeReport rep;
  if (target == "T")
    rep = referee_T(base, dir, s, cfg.q, cfg.target_size, solver_options(cfg));
  else if (target == "Q")
    rep = referee_Q(base, dir, s, cfg.q, cfg.p, cfg.target_size, solver_options(cfg));
  else
    throw ConfigError("variation target must be T or Q");

  json out;
  out["target"] = rep.target;
  out["s"] = rep.s;
  out["q"] = rep.q;
  if (target == "Q") out["p"] = rep.p;
  out["base_value"] = rep.base_value;
  out["measured"] = rep.d;
  out["measured_half_step"] = rep.d_half;
  out["richardson"] = rep.richardson;
  if (target == "T") {
    out["prediction_variational"] = rep.prediction_variational;
    out["ratio_variational"] =
        rep.prediction_variational != 0.0 ? rep.richardson / rep.prediction_variational
                                          : 0.0;
  } else {
    out["prediction_paper"] = rep.prediction_paper;
    out["ratio_paper"] =
        rep.prediction_paper != 0.0 ? rep.richardson / rep.prediction_paper : 0.0;
  }
  if (rep.has_scaling) {
    out["prediction_scaling"] = rep.prediction_scaling;
    out["ratio_scaling"] =
        rep.prediction_scaling != 0.0 ? rep.richardson / rep.prediction_scaling : 0.0;
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_verify() {
  auto checks = verify_suite();
  json out = json::array();
  bool all = true;
  for (const auto& c : checks) {
    out.push_back({{"check", c.check},
                   {"expected", c.expected},
                   {"measured", c.measured},
                   {"tolerance", c.tolerance},
                   {"pass", c.pass}});
    all = all && c.pass;
  }
  std::cout << out.dump(2) << "\n";
  return all ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dual torsional-rigidity measures and Gauss curvature flow"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;  // consumed by with_config; registered so CLI11 accepts it

  auto* run = app.add_subcommand("run", "integrate the normalized flow");
  add_common(run, cfg);
  run->add_option("--config", config_path, "config file (key=value or JSON)");
  run->add_option("--init", cfg.init, "initial body: disk:R|ellipse:a,b|fourier:...|csv:path");
  run->add_option("--f", cfg.f, "density: const:c|trig:k,a,b;...|csv:path");
  run->add_option("--dt0", cfg.dt0, "initial time step");
  run->add_option("--t-max", cfg.t_max, "time horizon");
  run->add_option("--tol-residual", cfg.tol_residual, "stationarity stopping tolerance");
  run->add_flag("--rescale,!--no-rescale", cfg.rescale, "hold Q_tilde at its initial value");
  run->add_flag("--symmetrize,!--no-symmetrize", cfg.symmetrize, "resymmetrize each step");
  run->add_option("--out", cfg.out_dir, "output directory");
  run->add_option("--seed", cfg.seed, "reserved; runs are deterministic");
  bool dump_mesh = false;
  run->add_flag("--dump-mesh", dump_mesh, "write final mesh CSVs");

  auto* measure = app.add_subcommand("measure", "evaluate the dual torsional measure");
  add_common(measure, cfg);
  measure->add_option("--config", config_path, "config file (key=value or JSON)");
  std::string body_path;
  std::vector<std::string> arcs;
  std::string densities_csv;
  measure->add_option("--body", body_path, "body CSV (theta,h); default --init");
  measure->add_option("--init", cfg.init, "body spec when --body is absent");
  measure->add_option("--arc", arcs, "normal-angle arc lo:hi (repeatable)");
  measure->add_option("--densities-csv", densities_csv, "dump densities to CSV");

  auto* variation = app.add_subcommand("variation", "finite-difference variational referee");
  add_common(variation, cfg);
  variation->add_option("--config", config_path, "config file (key=value or JSON)");
  std::string target = "Q";
  std::string direction = "const:1";
  double s_step = 1e-3;
  variation->add_option("--init", cfg.init, "base body spec");
  variation->add_option("--target", target, "T (rigidity) or Q (dual rigidity)");
  variation->add_option("--direction", direction, "perturbation direction spec");
  variation->add_option("--s", s_step, "finite-difference step");

  app.add_subcommand("verify", "run the oracle self-consistency suite");

  std::vector<std::string> args;
  try {
    args = with_config(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  try {
    std::vector<const char*> cargs;
    cargs.push_back(argv[0]);
    for (const auto& a : args) cargs.push_back(a.c_str());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (app.got_subcommand("run")) return cmd_run(cfg, dump_mesh);
    if (app.got_subcommand("measure"))
      return cmd_measure(cfg, body_path, arcs, densities_csv);
    if (app.got_subcommand("variation"))
      return cmd_variation(cfg, target, direction, s_step);
    if (app.got_subcommand("verify")) return cmd_verify();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
