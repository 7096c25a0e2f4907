#include "minkflow/interp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "minkflow/errors.hpp"

namespace minkflow {

double lagrange4_periodic(const std::vector<double>& f, double period, double x) {
  const int n = static_cast<int>(f.size());
  const double dx = period / n;
  double t = x / dx;
  double fl = std::floor(t);
  double s = t - fl;
  long i1 = static_cast<long>(fl);
  auto at = [&](long k) {
    long m = (i1 + k) % n;
    if (m < 0) m += n;
    return f[static_cast<size_t>(m)];
  };
  // Nodes at s = -1, 0, 1, 2.
  const double w0 = -s * (s - 1.0) * (s - 2.0) / 6.0;
  const double w1 = (s * s - 1.0) * (s - 2.0) / 2.0;
  const double w2 = -s * (s + 1.0) * (s - 2.0) / 2.0;
  const double w3 = s * (s * s - 1.0) / 6.0;
  return w0 * at(-1) + w1 * at(0) + w2 * at(1) + w3 * at(2);
}

std::vector<double> solve_cyclic_tridiag(const std::vector<double>& lower,
                                         const std::vector<double>& diag,
                                         const std::vector<double>& upper,
                                         const std::vector<double>& rhs) {
  const size_t n = diag.size();
  if (n < 3) throw Error("cyclic tridiagonal system needs n >= 3");

  auto thomas = [&](const std::vector<double>& d, const std::vector<double>& r) {
    std::vector<double> c(n), x(n);
    double beta = d[0];
    if (beta == 0.0) throw SingularSystem("tridiagonal pivot is zero");
    x[0] = r[0] / beta;
    for (size_t i = 1; i < n; ++i) {
      c[i] = upper[i - 1] / beta;
      beta = d[i] - lower[i] * c[i];
      if (beta == 0.0) throw SingularSystem("tridiagonal pivot is zero");
      x[i] = (r[i] - lower[i] * x[i - 1]) / beta;
    }
    for (size_t i = n - 1; i-- > 0;) x[i] -= c[i + 1] * x[i + 1];
    return x;
  };

  // Sherman-Morrison removal of the two corner entries.
  const double alpha = lower[0];        // couples x[0] to x[n-1]
  const double gammac = upper[n - 1];   // couples x[n-1] to x[0]
  const double g = -diag[0];
  std::vector<double> d(diag);
  d[0] -= g;
  d[n - 1] -= gammac * alpha / g;
  std::vector<double> u(n, 0.0);
  u[0] = g;
  u[n - 1] = gammac;
  std::vector<double> y = thomas(d, rhs);
  std::vector<double> z = thomas(d, u);
  const double vy = y[0] + alpha / g * y[n - 1];
  const double vz = z[0] + alpha / g * z[n - 1];
  const double fac = vy / (1.0 + vz);
  std::vector<double> x(n);
  for (size_t i = 0; i < n; ++i) x[i] = y[i] - fac * z[i];
  return x;
}

PeriodicCubicSpline::PeriodicCubicSpline(std::vector<double> x, std::vector<double> y,
                                         double period)
    : x_(std::move(x)), y_(std::move(y)), period_(period) {
  const size_t n = x_.size();
  if (n < 3 || y_.size() != n) throw Error("spline needs >= 3 knots");
  for (size_t i = 0; i + 1 < n; ++i)
    if (!(x_[i + 1] > x_[i])) throw Error("spline knots must be increasing");
  if (!(x_[0] + period_ > x_[n - 1])) throw Error("spline knots exceed one period");

  std::vector<double> h(n);
  for (size_t i = 0; i + 1 < n; ++i) h[i] = x_[i + 1] - x_[i];
  h[n - 1] = x_[0] + period_ - x_[n - 1];

  std::vector<double> lo(n), di(n), up(n), r(n);
  for (size_t i = 0; i < n; ++i) {
    const size_t im = (i + n - 1) % n;
    const size_t ip = (i + 1) % n;
    lo[i] = h[im] / 6.0;
    di[i] = (h[im] + h[i]) / 3.0;
    up[i] = h[i] / 6.0;
    r[i] = (y_[ip] - y_[i]) / h[i] - (y_[i] - y_[im]) / h[im];
  }
  m_ = solve_cyclic_tridiag(lo, di, up, r);
}

double PeriodicCubicSpline::eval(double x) const {
  const size_t n = x_.size();
  double t = std::fmod(x - x_[0], period_);
  if (t < 0) t += period_;
  t += x_[0];
  // Last true knot owns the wrap cell [x_{n-1}, x_0 + period).
  size_t i = static_cast<size_t>(
      std::upper_bound(x_.begin(), x_.end(), t) - x_.begin());
  i = (i == 0) ? n - 1 : i - 1;
  const size_t ip = (i + 1) % n;
  const double hi = (i == n - 1) ? (x_[0] + period_ - x_[n - 1]) : (x_[ip] - x_[i]);
  const double a = (x_[i] + hi - t) / hi;
  const double b = (t - x_[i]) / hi;
  return a * y_[i] + b * y_[ip] +
         ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[ip]) * hi * hi / 6.0;
}

double integrate_periodic_linear(const std::vector<double>& f, double period,
                                 double lo, double hi) {
  if (hi < lo) throw Error("integration bounds out of order");
  const int n = static_cast<int>(f.size());
  const double dx = period / n;
  auto fat = [&](long i) {
    long m = i % n;
    if (m < 0) m += n;
    return f[static_cast<size_t>(m)];
  };
  // Piecewise-linear antiderivative evaluated at cell-local coordinates.
  auto cell_area = [&](long i, double s0, double s1) {
    const double f0 = fat(i), f1 = fat(i + 1);
    auto prim = [&](double s) { return f0 * s + 0.5 * (f1 - f0) * s * s; };
    return dx * (prim(s1) - prim(s0));
  };
  const double t0 = lo / dx, t1 = hi / dx;
  const long c0 = static_cast<long>(std::floor(t0));
  const long c1 = static_cast<long>(std::floor(t1));
  if (c0 == c1) return cell_area(c0, t0 - c0, t1 - c1);
  double acc = cell_area(c0, t0 - c0, 1.0);
  for (long c = c0 + 1; c < c1; ++c) acc += cell_area(c, 0.0, 1.0);
  acc += cell_area(c1, 0.0, t1 - c1);
  return acc;
}

}  // namespace minkflow
