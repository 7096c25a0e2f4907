#pragma once

#include <string>
#include <vector>

#include "minkflow/geometry.hpp"
#include "minkflow/measures.hpp"
#include "minkflow/torsion.hpp"

namespace minkflow {

struct FlowOptions {
  double dt0 = 1e-3;
  double dt_max = 2e-2;
  double dt_floor = 1e-7;
  double growth = 1.25;       // dt growth per accepted step
  double cfl_safety = 0.9;    // cap dt at safety * 2/(stiffest curvature rate)
  double step_rtol = 1e-6;    // embedded Heun/Euler error control
  double C_guard = 1e3;       // 1/C <= h <= C and 1/C <= K <= C
  double tol_residual = 1e-3;
  double t_max = 10.0;
  long max_steps = 500000;
  int retry_cap = 60;
  bool rescale = true;
  bool symmetrize = false;
};

struct ProblemSpec {
  int n = 2;
  double q = 2.0;
  double p = -1.0;
  std::vector<double> f;  // density samples on the normal-angle grid
  bool even_mode = true;
  int N = 256;
  double target_size = 0.04;
  FlowOptions flow;
  TorsionOptions solver;

  void validate() const;
};

struct GuardStatus {
  double h_min = 0.0, h_max = 0.0, K_min = 0.0, K_max = 0.0;
};

struct FlowState {
  double t = 0.0;
  ConvexBody body;
  TorsionSolution torsion;
  double lambda = 0.0;
  double Q_tilde = 0.0;
  double Phi = 0.0;
  double residual = 0.0;
  GuardStatus guards;
};

// lambda(t) = integral rho^p |grad u|^q dv / integral f dx
double compute_lambda(const ConvexBody& body, const TorsionSolution& sol, double p,
                      const std::vector<double>& f);

// Phi = mean_f(log h) - log(integral rho^p |grad u|^q dv)^(1/(p(1+q)))
double compute_phi(const ConvexBody& body, const TorsionSolution& sol, double p,
                   double q, const std::vector<double>& f);

// d h_i/dt = -lambda f_i rho_b^(n-p) K_i / |grad u|_i^q + h_i, with rho_b the
// radius |X(theta_i)| of the boundary point carrying normal theta_i.
std::vector<double> flow_rhs(const FlowState& state, const std::vector<double>& f,
                             double p);

double flow_residual(const FlowState& state, const std::vector<double>& f, double p);

// Largest stable Heun step for the curvature stiffness at the Nyquist mode.
double stable_dt(const FlowState& state, const std::vector<double>& f, double p);

FlowState make_flow_state(const SupportFn& s, const ProblemSpec& spec);

struct StepInfo {
  double err_est = 0.0;       // embedded pair error, relative to max h
  double rescale_factor = 1.0;
  double phi_pre_rescale = 0.0;
};

// One Heun step with a fresh torsion solve per stage. Throws StepRejected when
// convexity, guards, or the error control fail; the caller halves dt.
FlowState flow_step(const FlowState& state, double dt, const ProblemSpec& spec,
                    double Q_ref, StepInfo* info = nullptr);

enum class FlowStatus { kConverged, kTimedOut, kAborted };

struct TimeSeriesRow {
  double t, lambda, phi, qtilde, residual, hmin, hmax, dt;
};

struct RunResult {
  FlowStatus status = FlowStatus::kTimedOut;
  std::string abort_reason;
  std::vector<TimeSeriesRow> rows;
  FlowState final_state;
  long steps = 0;
  long rejected_steps = 0;
  long phi_violations = 0;           // Phi increases beyond 1e-8 per step
  double qtilde_drift_per_unit_time = 0.0;
  double max_even_gap = 0.0;
  double wall_seconds = 0.0;
};

RunResult run_flow(const ProblemSpec& spec, const SupportFn& initial);

}  // namespace minkflow
