#pragma once

#include <vector>

namespace minkflow {

// Cubic Lagrange interpolation of periodic samples on the uniform grid
// x_i = i * period / n. Local 4-point stencil, O(dx^4) for smooth data.
double lagrange4_periodic(const std::vector<double>& f, double period, double x);

// Solves a cyclic tridiagonal system. lower[i], diag[i], upper[i] are the
// coefficients of x[i-1], x[i], x[i+1] (indices mod n).
std::vector<double> solve_cyclic_tridiag(const std::vector<double>& lower,
                                         const std::vector<double>& diag,
                                         const std::vector<double>& upper,
                                         const std::vector<double>& rhs);

// C^2 periodic cubic spline on non-uniform knots. Knots must be strictly
// increasing and span less than one period; the wrap interval closes the loop.
class PeriodicCubicSpline {
 public:
  PeriodicCubicSpline() = default;
  PeriodicCubicSpline(std::vector<double> x, std::vector<double> y, double period);
  double eval(double x) const;

 private:
  std::vector<double> x_, y_, m_;  // knots, values, second derivatives
  double period_ = 0.0;
};

// Integral of the piecewise-linear periodic interpolant of f (samples on the
// uniform grid with spacing period/n) over [lo, hi], hi - lo <= period.
double integrate_periodic_linear(const std::vector<double>& f, double period,
                                 double lo, double hi);

}  // namespace minkflow
