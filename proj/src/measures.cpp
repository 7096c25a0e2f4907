#include "minkflow/measures.hpp"

#include <algorithm>
#include <cmath>

#include "minkflow/errors.hpp"
#include "minkflow/interp.hpp"
#include "minkflow/oracles.hpp"

namespace minkflow {

double ba_constant(double q, int n) {
  return (q - 1.0) / (q + n * (q - 1.0));
}

namespace {

// |grad u| at the boundary point with normal angle xi, by local cubic
// interpolation of the nodal trace on the uniform normal-angle grid.
double grad_at(const TorsionSolution& sol, double xi) {
  return lagrange4_periodic(sol.boundary_grad, kTwoPi, xi);
}

double rel_gap(double a, double b) {
  const double scale = std::max(std::fabs(a), std::fabs(b));
  return scale > 0.0 ? std::fabs(a - b) / scale : 0.0;
}

}  // namespace

std::vector<double> q_torsional_measure_density(const ConvexBody& body,
                                                const TorsionSolution& sol) {
  std::vector<double> d(body.N);
  for (int i = 0; i < body.N; ++i)
    d[i] = std::pow(sol.boundary_grad[i], sol.q) * body.dS[i];
  return d;
}

double DualMeasureDensity::gap() const { return rel_gap(total_v, total_x); }
double ArcMeasure::gap() const { return rel_gap(value_v, value_x); }

DualMeasureDensity dual_measure(const ConvexBody& body, const TorsionSolution& sol,
                                double p) {
  if (p == 0.0) throw ConfigError("dual measure needs p != 0");
  DualMeasureDensity m;
  m.p = p;
  m.q = sol.q;
  m.n = 2;
  m.ba = ba_constant(sol.q, m.n);
  m.density_v.resize(body.N);
  m.density_x.resize(body.N);
  const double dth = kTwoPi / body.N;
  for (int j = 0; j < body.N; ++j) {
    const double g = grad_at(sol, body.alpha[j]);
    m.density_v[j] = m.ba * std::pow(body.rho[j], p) * std::pow(g, sol.q);
    if (!(m.density_v[j] > 0.0))
      throw DegenerateGradient("dual density_v not positive at node " +
                               std::to_string(j));
  }
  for (int i = 0; i < body.N; ++i) {
    const double rb = body.X[i].norm();  // (|grad h|^2 + h^2)^(1/2)
    m.density_x[i] = m.ba * std::pow(rb, p - m.n) * body.support.h[i] *
                     std::pow(sol.boundary_grad[i], sol.q) * body.dS[i];
    if (!(m.density_x[i] > 0.0))
      throw DegenerateGradient("dual density_x not positive at node " +
                               std::to_string(i));
  }
  for (int j = 0; j < body.N; ++j) m.total_v += m.density_v[j] * dth;
  for (int i = 0; i < body.N; ++i) m.total_x += m.density_x[i] * dth;
  return m;
}

ArcMeasure measure_of_arc(const ConvexBody& body, const TorsionSolution& sol,
                          double p, double lo, double hi) {
  if (!(hi > lo) || hi - lo > kTwoPi)
    throw ConfigError("arc length must lie in (0, 2*pi]");
  DualMeasureDensity m = dual_measure(body, sol, p);
  ArcMeasure a;
  a.lo = lo;
  a.hi = hi;
  a.value_x = integrate_periodic_linear(m.density_x, kTwoPi, lo, hi);
  const auto [vlo, vhi] = alpha_star_arc(body, lo, hi);
  a.value_v = integrate_periodic_linear(m.density_v, kTwoPi, vlo, vhi);
  return a;
}

double dual_mixed(const ConvexBody& body1, const TorsionSolution& sol1,
                  const ConvexBody& body2, double p) {
  if (body1.N != body2.N) throw ConfigError("bodies must share the grid");
  const double ba = ba_constant(sol1.q, 2);
  const double dth = kTwoPi / body1.N;
  double acc = 0.0;
  for (int j = 0; j < body1.N; ++j) {
    const double g = grad_at(sol1, body1.alpha[j]);
    acc += std::pow(body2.rho[j], p) * std::pow(body1.rho[j], 2.0 - p) *
           std::pow(g, sol1.q);
  }
  return ba * acc * dth;
}

SupportFn realize_family(const PerturbationFamily& family, double s) {
  const int N = family.base.N;
  if (static_cast<int>(family.direction.size()) != N)
    throw ConfigError("direction and base grids differ");
  try {
    if (family.mode == FamilyMode::kWulffLog) {
      std::vector<double> h(N);
      for (int i = 0; i < N; ++i)
        h[i] = family.base.h[i] * std::exp(s * family.direction[i]);
      return build_support_fn(h);
    }
    // radial-log: perturb the radial samples, rebuild the support function
    // from the perturbed boundary curve Y(v) = rho_s(v) e(v): the normal angle
    // there is v - atan(rho'/rho) and the support value rho^2/sqrt(rho^2+rho'^2).
    const ConvexBody base = build_body(family.base);
    std::vector<double> rs(N), xi(N), hv(N);
    for (int j = 0; j < N; ++j)
      rs[j] = base.rho[j] * std::exp(s * family.direction[j]);
    const std::vector<double> drs = periodic_d1(rs);
    for (int j = 0; j < N; ++j) {
      xi[j] = base.theta[j] - std::atan2(drs[j], rs[j]);
      hv[j] = rs[j] * rs[j] / std::hypot(rs[j], drs[j]);
    }
    // xi must be increasing to define a convex curve
    for (int j = 0; j < N; ++j) {
      const double d = xi[(j + 1) % N] - xi[j];
      const double dd = j + 1 == N ? d + kTwoPi : d;
      if (!(dd > 0.0)) throw NonConvexPerturbation("normal angle not monotone");
    }
    PeriodicCubicSpline sp(xi, hv, kTwoPi);
    std::vector<double> h(N);
    for (int i = 0; i < N; ++i) h[i] = sp.eval(kTwoPi * i / N);
    return build_support_fn(h);
  } catch (const NonConvexError& e) {
    throw NonConvexPerturbation(std::string("perturbed body not convex: ") + e.what());
  } catch (const NonPositiveError& e) {
    throw NonConvexPerturbation(std::string("perturbed body not positive: ") + e.what());
  }
}

namespace {

bool is_constant(const std::vector<double>& v) {
  for (double x : v)
    if (x != v[0]) return false;
  return true;
}

}  // namespace

RefereeReport referee_T(const SupportFn& base, const std::vector<double>& direction,
                        double s, double q, double target_size,
                        const TorsionOptions& opts) {
  RefereeReport rep;
  rep.target = "T_tilde";
  rep.s = s;
  rep.q = q;
  rep.direction_constant = is_constant(direction);

  PerturbationFamily fam{FamilyMode::kRadialLog, base, direction};
  auto value = [&](double ss) {
    const ConvexBody b = build_body(realize_family(fam, ss));
    TorsionSolution sol = solve_torsion(b, q, target_size, opts);
    return sol.T_tilde;
  };
  FdDerivative d = fd_derivative(value, s);
  rep.d = d.d;
  rep.d_half = d.d_half;
  rep.richardson = d.richardson;

  const ConvexBody b0 = build_body(base);
  TorsionSolution sol0 = solve_torsion(b0, q, target_size, opts);
  rep.base_value = sol0.T_tilde;
  // claimed derivative: integral g rho^n |grad u(r(v))|^q dv
  const double dth = kTwoPi / base.N;
  double acc = 0.0;
  for (int j = 0; j < base.N; ++j) {
    const double g = lagrange4_periodic(sol0.boundary_grad, kTwoPi, b0.alpha[j]);
    acc += direction[j] * b0.rho[j] * b0.rho[j] * std::pow(g, q);
  }
  rep.prediction_variational = acc * dth;
  if (rep.direction_constant) {
    rep.has_scaling = true;
    rep.prediction_scaling =
        direction[0] * (2.0 + q / (q - 1.0)) * sol0.T_tilde;
  }
  return rep;
}

RefereeReport referee_Q(const SupportFn& base, const std::vector<double>& direction,
                        double s, double q, double p, double target_size,
                        const TorsionOptions& opts) {
  if (p == 0.0) throw ConfigError("referee needs p != 0");
  RefereeReport rep;
  rep.target = "Q_tilde";
  rep.s = s;
  rep.q = q;
  rep.p = p;
  rep.direction_constant = is_constant(direction);

  PerturbationFamily fam{FamilyMode::kWulffLog, base, direction};
  auto value = [&](double ss) {
    const ConvexBody b = build_body(realize_family(fam, ss));
    TorsionSolution sol = solve_torsion(b, q, target_size, opts);
    return dual_measure(b, sol, p).total_v;
  };
  FdDerivative d = fd_derivative(value, s);
  rep.d = d.d;
  rep.d_half = d.d_half;
  rep.richardson = d.richardson;

  const ConvexBody b0 = build_body(base);
  TorsionSolution sol0 = solve_torsion(b0, q, target_size, opts);
  DualMeasureDensity m0 = dual_measure(b0, sol0, p);
  rep.base_value = m0.total_v;
  // the claimed derivative p(1+q) * integral f dQ; for the x-representation
  // the integrand is f(xi) density_x(xi)
  const double dth = kTwoPi / base.N;
  double acc = 0.0;
  for (int i = 0; i < base.N; ++i) acc += direction[i] * m0.density_x[i];
  rep.prediction_paper = p * (1.0 + q) * acc * dth;
  if (rep.direction_constant) {
    rep.has_scaling = true;
    rep.prediction_scaling =
        direction[0] * (p + q / (q - 1.0)) * m0.total_v;
  }
  return rep;
}

}  // namespace minkflow
