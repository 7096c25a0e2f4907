#include <doctest.h>

#include <cmath>

#include "minkflow/geometry.hpp"
#include "minkflow/oracles.hpp"

using namespace minkflow;

TEST_CASE("ball oracle closed forms") {
  BallOracle o = ball_torsion(1.0, 2, 2.0);
  CHECK(o.grad_boundary == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(o.T_tilde == doctest::Approx(kPi / 8.0).epsilon(1e-15));
  CHECK(o.u(0.0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(o.u(1.0) == doctest::Approx(0.0).epsilon(1e-15));

  BallOracle o3 = ball_torsion(1.0, 2, 3.0);
  CHECK(o3.grad_boundary == doctest::Approx(std::pow(2.0, -0.5)).epsilon(1e-15));
  CHECK(o3.T_tilde == doctest::Approx(kPi * std::sqrt(2.0) / 7.0).epsilon(1e-14));
  CHECK(o3.u(0.0) == doctest::Approx(2.0 / 3.0 * std::pow(2.0, -0.5)).epsilon(1e-14));

  BallOracle o2 = ball_torsion(2.0, 2, 2.0);
  CHECK(o2.T_tilde == doctest::Approx(2.0 * kPi).epsilon(1e-14));
}

TEST_CASE("ball oracle internal consistency") {
  for (double q : {1.5, 2.0, 3.0, 5.0}) {
    for (double R : {0.5, 1.0, 2.0}) {
      BallOracle o = ball_torsion(R, 2, q);
      CHECK(o.pohozaev_gap() < 1e-12);
      CHECK(o.quadrature_gap() < 1e-10);
      for (double frac : {0.2, 0.5, 0.9}) CHECK(o.ode_residual(frac * R) < 1e-8);
      CHECK(-o.du(R) == doctest::Approx(o.grad_boundary).epsilon(1e-13));
      CHECK(o.u(0.5 * R) > o.u(0.9 * R));  // decreasing profile
    }
  }
}

TEST_CASE("brute force radial function") {
  SupportFn disk = support_disk(2.0, 128);
  for (double v : {0.0, 0.7, 3.1, 5.9})
    CHECK(brute_force_radial(disk, v) == doctest::Approx(2.0).epsilon(1e-10));

  SupportFn ell = support_ellipse(2.0, 1.0, 256);
  CHECK(brute_force_radial(ell, 0.0) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(brute_force_radial(ell, kPi / 4) ==
        doctest::Approx(2.0 / std::sqrt(2.5)).epsilon(1e-7));

  // agreement with the interpolated radial function
  ConvexBody body = build_body(ell);
  double worst = 0.0;
  for (int j = 0; j < body.N; ++j)
    worst = std::max(worst,
                    std::fabs(brute_force_radial(ell, body.theta[j]) - body.rho[j]) /
                        body.rho[j]);
  CHECK(worst < 1e-6);
}

TEST_CASE("finite-difference harness") {
  FdDerivative even = fd_derivative([](double s) { return s * s; }, 0.1);
  CHECK(std::fabs(even.d) < 1e-14);
  CHECK(std::fabs(even.richardson) < 1e-13);

  const double k = 2.5;
  FdDerivative d = fd_derivative([&](double s) { return 3.0 * std::exp(k * s); }, 1e-2);
  CHECK(d.d / 3.0 == doctest::Approx(k).epsilon(1e-4));
  const double err_d = std::fabs(d.d / 3.0 - k);
  const double err_r = std::fabs(d.richardson / 3.0 - k);
  CHECK(err_r < err_d / 4.0);
}

TEST_CASE("verify suite is green") {
  auto checks = verify_suite();
  CHECK(checks.size() > 20);
  for (const auto& c : checks) {
    INFO(c.check, " expected ", c.expected, " measured ", c.measured);
    CHECK(c.pass);
  }
}
