#include "minkflow/flow.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "minkflow/errors.hpp"
#include "minkflow/interp.hpp"

namespace minkflow {

void ProblemSpec::validate() const {
  if (n != 2) throw ConfigError("implementation fixes n = 2");
  if (!(q > 1.0)) throw ConfigError("q must satisfy q > 1");
  if (p == 0.0) throw ConfigError("p must be nonzero");
  if (!(p < n)) throw ConfigError("p must satisfy p < n");
  if (N < 16 || N % 2 != 0) throw ConfigError("grid size must be even and >= 16");
  if (static_cast<int>(f.size()) != N) throw ConfigError("f must be sampled on the grid");
  for (double v : f)
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("f must be positive");
  if (p >= 0.0 && !even_mode)
    throw ConfigError("p >= 0 requires even_mode (origin symmetry)");
  if (even_mode && !samples_even(f, 1e-12))
    throw ConfigError("even_mode requires f(theta) = f(theta + pi)");
  if (!(target_size > 0.0)) throw ConfigError("target_size must be positive");
}

namespace {

double integral_f(const std::vector<double>& f) {
  double acc = 0.0;
  for (double v : f) acc += v;
  return acc * kTwoPi / f.size();
}

// integral rho^p |grad u(r(v))|^q dv on the shared grid
double dual_numerator(const ConvexBody& body, const TorsionSolution& sol, double p) {
  const double dth = kTwoPi / body.N;
  double acc = 0.0;
  for (int j = 0; j < body.N; ++j) {
    const double g = lagrange4_periodic(sol.boundary_grad, kTwoPi, body.alpha[j]);
    acc += std::pow(body.rho[j], p) * std::pow(g, sol.q);
  }
  return acc * dth;
}

GuardStatus guard_status(const ConvexBody& body) {
  return {body.min_h, body.max_h, body.min_K, body.max_K};
}

void check_guards(const ConvexBody& body, double C) {
  if (body.min_h < 1.0 / C || body.max_h > C)
    throw StepRejected("support guard violated: h in [" +
                       std::to_string(body.min_h) + ", " +
                       std::to_string(body.max_h) + "]");
  if (body.min_K < 1.0 / C || body.max_K > C)
    throw StepRejected("curvature guard violated: K in [" +
                       std::to_string(body.min_K) + ", " +
                       std::to_string(body.max_K) + "]");
}

}  // namespace

double compute_lambda(const ConvexBody& body, const TorsionSolution& sol, double p,
                      const std::vector<double>& f) {
  return dual_numerator(body, sol, p) / integral_f(f);
}

double compute_phi(const ConvexBody& body, const TorsionSolution& sol, double p,
                   double q, const std::vector<double>& f) {
  double num = 0.0, den = 0.0;
  for (int i = 0; i < body.N; ++i) {
    num += std::log(body.support.h[i]) * f[i];
    den += f[i];
  }
  const double logterm = std::log(dual_numerator(body, sol, p));
  return num / den - logterm / (p * (1.0 + q));
}

std::vector<double> flow_rhs(const FlowState& state, const std::vector<double>& f,
                             double p) {
  const ConvexBody& b = state.body;
  const int n = 2;
  std::vector<double> out(b.N);
  for (int i = 0; i < b.N; ++i) {
    const double rb = b.X[i].norm();
    const double g = state.torsion.boundary_grad[i];
    out[i] = -state.lambda * f[i] * std::pow(rb, n - p) * b.K[i] /
                 std::pow(g, state.torsion.q) +
             b.support.h[i];
  }
  return out;
}

double flow_residual(const FlowState& state, const std::vector<double>& f, double p) {
  const std::vector<double> r = flow_rhs(state, f, p);
  double worst = 0.0;
  for (double v : r) worst = std::max(worst, std::fabs(v));
  return worst / state.body.max_h;
}

double stable_dt(const FlowState& state, const std::vector<double>& f, double p) {
  // Linearized curvature stiffness: the Nyquist mode k = N/2 feels the rate
  // (k^2 - 1) * lambda f rho_b^(n-p) K^2 / |grad u|^q; Heun is stable up to
  // dt * rate = 2.
  const ConvexBody& b = state.body;
  const double kmax2 = double(b.N / 2) * double(b.N / 2) - 1.0;
  double worst = 0.0;
  for (int i = 0; i < b.N; ++i) {
    const double rb = b.X[i].norm();
    const double g = state.torsion.boundary_grad[i];
    const double rate = state.lambda * f[i] * std::pow(rb, 2.0 - p) * b.K[i] *
                        b.K[i] / std::pow(g, state.torsion.q);
    worst = std::max(worst, rate);
  }
  return 2.0 / (kmax2 * worst);
}

namespace {

FlowState state_from_body(ConvexBody body, double t, const ProblemSpec& spec) {
  FlowState s;
  s.t = t;
  s.body = std::move(body);
  s.torsion = solve_torsion(s.body, spec.q, spec.target_size, spec.solver);
  s.lambda = compute_lambda(s.body, s.torsion, spec.p, spec.f);
  s.Q_tilde = ba_constant(spec.q, spec.n) * dual_numerator(s.body, s.torsion, spec.p);
  s.Phi = compute_phi(s.body, s.torsion, spec.p, spec.q, spec.f);
  s.residual = flow_residual(s, spec.f, spec.p);
  s.guards = guard_status(s.body);
  return s;
}

}  // namespace

FlowState make_flow_state(const SupportFn& s, const ProblemSpec& spec) {
  return state_from_body(build_body(s), 0.0, spec);
}

FlowState flow_step(const FlowState& state, double dt, const ProblemSpec& spec,
                    double Q_ref, StepInfo* info) {
  const int N = state.body.N;
  const double qprime = spec.q / (spec.q - 1.0);

  auto try_body = [&](const std::vector<double>& h) {
    try {
      ConvexBody b = build_body(build_support_fn(h));
      check_guards(b, spec.flow.C_guard);
      return b;
    } catch (const NonConvexError& e) {
      throw StepRejected(std::string("convexity lost: ") + e.what());
    } catch (const NonPositiveError& e) {
      throw StepRejected(std::string("positivity lost: ") + e.what());
    } catch (const WindingError& e) {
      throw StepRejected(std::string("winding lost: ") + e.what());
    } catch (const MeshFailure& e) {
      throw StepRejected(std::string("mesh failure: ") + e.what());
    }
  };

  // Heun stage 1
  const std::vector<double> k1 = flow_rhs(state, spec.f, spec.p);
  std::vector<double> h1(N);
  for (int i = 0; i < N; ++i) h1[i] = state.body.support.h[i] + dt * k1[i];
  FlowState mid;
  mid.body = try_body(h1);
  try {
    mid.torsion = solve_torsion(mid.body, spec.q, spec.target_size, spec.solver);
  } catch (const Error& e) {
    throw StepRejected(std::string("stage solve failed: ") + e.what());
  }
  mid.lambda = compute_lambda(mid.body, mid.torsion, spec.p, spec.f);

  // Heun stage 2 and embedded error estimate
  const std::vector<double> k2 = flow_rhs(mid, spec.f, spec.p);
  double err = 0.0;
  std::vector<double> hn(N);
  for (int i = 0; i < N; ++i) {
    hn[i] = state.body.support.h[i] + 0.5 * dt * (k1[i] + k2[i]);
    err = std::max(err, 0.5 * dt * std::fabs(k2[i] - k1[i]));
  }
  const double err_rel = err / state.body.max_h;
  if (err_rel > spec.flow.step_rtol)
    throw StepRejected("step error " + std::to_string(err_rel) + " above rtol");

  if (spec.flow.symmetrize) {
    for (int i = 0; i < N / 2; ++i) {
      const double m = 0.5 * (hn[i] + hn[i + N / 2]);
      hn[i] = m;
      hn[i + N / 2] = m;
    }
  }

  FlowState next = state_from_body(try_body(hn), state.t + dt, spec);

  if (info) {
    info->err_est = err_rel;
    info->phi_pre_rescale = next.Phi;
    info->rescale_factor = 1.0;
  }

  if (spec.flow.rescale) {
    const double expo = spec.p + qprime;
    if (std::fabs(expo) >= 1e-6) {
      const double c = std::pow(Q_ref / next.Q_tilde, 1.0 / expo);
      // Scale the solved state exactly by homogeneity instead of re-solving:
      // u -> c^q' u, |grad u| -> c^(1/(q-1)) |grad u|, mesh -> c mesh.
      std::vector<double> hs(N);
      for (int i = 0; i < N; ++i) hs[i] = c * hn[i];
      FlowState scaled;
      scaled.t = next.t;
      scaled.body = try_body(hs);
      scaled.torsion = next.torsion;
      scaled.torsion.mesh.quality.max_edge *= c;
      for (auto& v : scaled.torsion.mesh.v) v = v * c;
      const double cu = std::pow(c, qprime);
      for (auto& v : scaled.torsion.u) v *= cu;
      const double cg = std::pow(c, 1.0 / (spec.q - 1.0));
      for (auto& g : scaled.torsion.grad) g = g * (cu / c);
      for (auto& g : scaled.torsion.boundary_grad) g *= cg;
      const double cT = std::pow(c, 2.0 + qprime);
      scaled.torsion.T_tilde *= cT;
      scaled.torsion.T_tilde_boundary *= cT;
      scaled.torsion.energy *= cT;
      scaled.lambda = compute_lambda(scaled.body, scaled.torsion, spec.p, spec.f);
      scaled.Q_tilde = next.Q_tilde * std::pow(c, expo);
      scaled.Phi = compute_phi(scaled.body, scaled.torsion, spec.p, spec.q, spec.f);
      scaled.residual = flow_residual(scaled, spec.f, spec.p);
      scaled.guards = guard_status(scaled.body);
      if (info) info->rescale_factor = c;
      next = std::move(scaled);
    }
  }
  return next;
}

RunResult run_flow(const ProblemSpec& spec, const SupportFn& initial) {
  spec.validate();
  if (initial.N != spec.N) throw ConfigError("initial body is not on the grid");
  if (spec.even_mode && !samples_even(initial.h, 1e-10))
    throw ConfigError("even_mode requires an origin-symmetric initial body");

  const auto t_start = std::chrono::steady_clock::now();
  RunResult res;
  FlowState state = make_flow_state(initial, spec);
  const double Q0 = state.Q_tilde;

  double dt = spec.flow.dt0;
  auto record = [&](double used_dt) {
    res.rows.push_back({state.t, state.lambda, state.Phi, state.Q_tilde,
                        state.residual, state.body.min_h, state.body.max_h, used_dt});
  };
  record(0.0);

  std::string abort_reason;
  std::string last_reject;
  while (true) {
    if (state.residual < spec.flow.tol_residual) {
      res.status = FlowStatus::kConverged;
      break;
    }
    if (state.t >= spec.flow.t_max || res.steps >= spec.flow.max_steps) {
      res.status = FlowStatus::kTimedOut;
      break;
    }
    const double dt_cap = spec.flow.cfl_safety * stable_dt(state, spec.f, spec.p);
    double dt_eff = std::min({dt, dt_cap, spec.flow.dt_max,
                              spec.flow.t_max - state.t + 1e-15});
    bool accepted = false;
    for (int retry = 0; retry <= spec.flow.retry_cap; ++retry) {
      try {
        StepInfo info;
        FlowState next = flow_step(state, dt_eff, spec, Q0, &info);
        const double dphi = info.phi_pre_rescale - state.Phi;
        if (dphi > 1e-8) ++res.phi_violations;
        if (spec.even_mode)
          res.max_even_gap = std::max(res.max_even_gap, even_gap(next.body.support.h));
        state = std::move(next);
        ++res.steps;
        record(dt_eff);
        dt = std::min(dt_eff * spec.flow.growth, spec.flow.dt_max);
        accepted = true;
        break;
      } catch (const StepRejected& e) {
        ++res.rejected_steps;
        last_reject = e.what();
        dt_eff *= 0.5;
        if (dt_eff < spec.flow.dt_floor) {
          abort_reason = "step size underflow after repeated rejection";
          break;
        }
      }
    }
    if (!accepted) {
      if (abort_reason.empty()) abort_reason = "retry cap exceeded";
      if (!last_reject.empty()) abort_reason += "; last rejection: " + last_reject;
      res.status = FlowStatus::kAborted;
      break;
    }
    if (spec.even_mode && even_gap(state.body.support.h) >
                              1e-8 * std::max(1.0, state.body.max_h)) {
      abort_reason = "even-mode symmetry drifted beyond 1e-8";
      res.status = FlowStatus::kAborted;
      break;
    }
  }

  res.abort_reason = abort_reason;
  res.final_state = state;
  if (state.t > 0.0)
    res.qtilde_drift_per_unit_time = std::fabs(state.Q_tilde - Q0) / (Q0 * state.t);
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return res;
}

}  // namespace minkflow
