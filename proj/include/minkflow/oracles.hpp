#pragma once

#include <functional>
#include <string>
#include <vector>

#include "minkflow/geometry.hpp"
#include "minkflow/torsion.hpp"

namespace minkflow {

// Closed-form torsion solution on the ball of radius R:
//   u(r) = ((q-1)/q) n^(-1/(q-1)) (R^q' - r^q'),  q' = q/(q-1).
struct BallOracle {
  double R = 1.0;
  int n = 2;
  double q = 2.0;
  double qprime = 2.0;
  double grad_boundary = 0.0;  // (R/n)^(1/(q-1))
  double T_tilde = 0.0;        // n^(-1/(q-1)) w_n R^(n+q') / (n+q')

  double u(double r) const;
  double du(double r) const;
  // |r^(1-n) d/dr(r^(n-1) |u'|^(q-2) u') + 1| with the outer derivative by
  // central differences of the closed-form u'.
  double ode_residual(double r) const;
  // relative gap between T_tilde and the Pohozaev boundary formula
  double pohozaev_gap() const;
  // relative gap between T_tilde and direct radial quadrature of u
  double quadrature_gap() const;
};

BallOracle ball_torsion(double R, int n, double q);

// Wulff-form radial function: min over theta with cos(theta - v) > 0 of
// h(theta)/cos(theta - v), on a 16x refined grid with a parabolic touch-up.
double brute_force_radial(const SupportFn& s, double v);

struct FdDerivative {
  double d = 0.0;          // central difference at step s
  double d_half = 0.0;     // central difference at s/2
  double richardson = 0.0; // (4 d_half - d) / 3
};
FdDerivative fd_derivative(const std::function<double(double)>& evaluate, double s);

struct ScalingReport {
  double c = 0.0;
  double T_exponent_measured = 0.0, T_exponent_expected = 0.0;
  double Q_exponent_measured = 0.0, Q_exponent_expected = 0.0;
  double T_base = 0.0, T_scaled = 0.0, Q_base = 0.0, Q_scaled = 0.0;
};

// Solves on the body and on its c-dilation and compares measured homogeneity
// exponents of T_tilde and Q_tilde against n + q/(q-1) and p + q/(q-1).
ScalingReport scaling_suite(const SupportFn& s, double q, double p, double c,
                            double target_size, const TorsionOptions& opts = {});

struct CheckResult {
  std::string check;
  double expected = 0.0;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Full oracle self-consistency suite backing the `verify` subcommand.
std::vector<CheckResult> verify_suite();

}  // namespace minkflow
