#include <doctest.h>

#include <cmath>
#include <random>

#include "minkflow/errors.hpp"
#include "minkflow/geometry.hpp"

using namespace minkflow;

namespace {

// small random Fourier perturbations of the unit disk, always convex
// (sum of k^2 (|a_k| + |b_k|) stays below 1)
SupportFn random_body(std::mt19937& rng, int N = 128) {
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  std::vector<FourierTerm> terms{{0, 1.0, 0.0}};
  for (int k = 2; k <= 6; ++k)
    terms.push_back({k, 0.05 * amp(rng) / (k * k), 0.05 * amp(rng) / (k * k)});
  return support_from_fourier(terms, N);
}

}  // namespace

TEST_CASE("unit disk support function") {
  SupportFn s = support_disk(1.0, 256);
  for (int i = 0; i < s.N; ++i) {
    CHECK(s.h[i] == 1.0);
    CHECK(s.d2h[i] + s.h[i] == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("ellipse support derivatives at the major axis") {
  SupportFn s = support_ellipse(2.0, 1.0, 256);
  CHECK(s.d2h[0] + s.h[0] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("non-convex data is rejected") {
  std::vector<FourierTerm> terms{{0, 1.0, 0.0}, {2, 0.9, 0.0}};
  CHECK_THROWS_AS(support_from_fourier(terms, 256), NonConvexError);
}

TEST_CASE("non-positive and bad-grid data are rejected") {
  CHECK_THROWS_AS(build_support_fn(std::vector<double>(64, -1.0)), NonPositiveError);
  CHECK_THROWS_AS(build_support_fn(std::vector<double>(8, 1.0)), BadGridError);
  CHECK_THROWS_AS(build_support_fn(std::vector<double>(17, 1.0)), BadGridError);
}

TEST_CASE("boundary embedding") {
  SupportFn one = support_disk(1.0, 64);
  auto X = boundary_embedding(one);
  for (int i = 0; i < 64; ++i) {
    const double t = kTwoPi * i / 64;
    CHECK(X[i].x == doctest::Approx(std::cos(t)).epsilon(1e-14));
    CHECK(X[i].y == doctest::Approx(std::sin(t)).epsilon(1e-14));
  }
  auto X2 = boundary_embedding(support_disk(2.0, 64));
  CHECK(X2[0].x == doctest::Approx(2.0));

  auto Xe = boundary_embedding(support_ellipse(2.0, 1.0, 256));
  CHECK(Xe[0].x == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(Xe[0].y == doctest::Approx(0.0).epsilon(1e-10));

  // supporting line property: X . x(theta) = h(theta) exactly
  SupportFn e = support_ellipse(2.0, 1.0, 256);
  for (int i = 0; i < e.N; ++i) {
    const double t = kTwoPi * i / e.N;
    CHECK(Xe[i].x * std::cos(t) + Xe[i].y * std::sin(t) ==
          doctest::Approx(e.h[i]).epsilon(1e-13));
  }
}

TEST_CASE("curvature of disks and the ellipse") {
  auto K1 = curvature(support_disk(1.0, 128));
  auto K2 = curvature(support_disk(2.0, 128));
  for (int i = 0; i < 128; ++i) {
    CHECK(K1[i] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(K2[i] == doctest::Approx(0.5).epsilon(1e-12));
  }
  auto Ke = curvature(support_ellipse(2.0, 1.0, 256));
  CHECK(Ke[0] == doctest::Approx(2.0).epsilon(1e-6));  // a/b^2
}

TEST_CASE("radial function of disk and ellipse") {
  ConvexBody disk = build_body(support_disk(2.0, 256));
  for (int j = 0; j < disk.N; ++j) CHECK(disk.rho[j] == doctest::Approx(2.0).epsilon(1e-12));

  ConvexBody ell = build_body(support_ellipse(2.0, 1.0, 256));
  CHECK(ell.rho[0] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(ell.rho[64] == doctest::Approx(1.0).epsilon(1e-9));  // v = pi/2
  CHECK(rho_at(ell, kPi / 4) == doctest::Approx(2.0 / std::sqrt(2.5)).epsilon(1e-9));
}

TEST_CASE("radial gauss map and its reverse") {
  ConvexBody disk = build_body(support_disk(1.5, 256));
  for (int j = 0; j < disk.N; ++j)
    CHECK(disk.alpha[j] == doctest::Approx(disk.theta[j]).epsilon(1e-12));

  ConvexBody ell = build_body(support_ellipse(2.0, 1.0, 256));
  CHECK(ell.alpha[0] == doctest::Approx(0.0));
  CHECK(std::fmod(ell.alpha[64], kTwoPi) == doctest::Approx(kPi / 2).epsilon(1e-9));
  CHECK(alpha_at(ell, kPi / 4) == doctest::Approx(std::atan(4.0)).epsilon(1e-9));

  // alpha inverts phi on grid nodes: 1e-8 on the disk, 1e-4 on the ellipse
  // (phi carries the stencil derivative, alpha the trig one)
  for (int i = 0; i < disk.N; i += 7) {
    const double back_d = alpha_at(disk, disk.phi[i]);
    CHECK(std::fabs(std::remainder(back_d - disk.theta[i], kTwoPi)) < 1e-8);
  }
  for (int i = 0; i < ell.N; i += 7) {
    const double v = ell.phi[i];
    const double back = alpha_at(ell, v);
    CHECK(std::fabs(std::remainder(back - ell.theta[i], kTwoPi)) < 1e-4);
  }

  // alpha_star(alpha(v)) = v for arcs
  auto arc = alpha_star_arc(ell, 0.3, 1.1);
  CHECK(phi_at(ell, 0.3) == doctest::Approx(arc.first));
  CHECK(std::fabs(std::remainder(alpha_at(ell, arc.first) - 0.3, kTwoPi)) < 1e-9);
}

TEST_CASE("jacobian J") {
  ConvexBody d1 = build_body(support_disk(1.0, 128));
  ConvexBody d2 = build_body(support_disk(2.0, 128));
  for (int j = 0; j < 128; ++j) {
    CHECK(d1.Jv[j] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d2.Jv[j] == doctest::Approx(2.0).epsilon(1e-12));
  }
  ConvexBody ell = build_body(support_ellipse(2.0, 1.0, 256));
  CHECK(ell.Jv[0] == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("polar body") {
  ConvexBody p2 = polar_body(support_disk(2.0, 128));
  for (int i = 0; i < 128; ++i) CHECK(p2.support.h[i] == doctest::Approx(0.5).epsilon(1e-12));

  ConvexBody p1 = polar_body(support_disk(1.0, 128));
  for (int i = 0; i < 128; ++i) CHECK(p1.support.h[i] == doctest::Approx(1.0).epsilon(1e-12));

  // polar of the 2x1 ellipse is the ellipse with semi-axes 1/2 and 1
  ConvexBody pe = polar_body(support_ellipse(2.0, 1.0, 256));
  SupportFn expect = support_ellipse(0.5, 1.0, 256);
  for (int i = 0; i < 256; ++i)
    CHECK(pe.support.h[i] == doctest::Approx(expect.h[i]).epsilon(1e-8));

  // involution
  ConvexBody pp = polar_body(pe.support);
  SupportFn orig = support_ellipse(2.0, 1.0, 256);
  for (int i = 0; i < 256; ++i)
    CHECK(pp.support.h[i] == doctest::Approx(orig.h[i]).epsilon(1e-7));
}

TEST_CASE("min/max of rho match min/max of h") {
  std::mt19937 rng(42);
  for (int rep = 0; rep < 6; ++rep) {
    ConvexBody b = build_body(random_body(rng));
    const double tol = 2.0 * kTwoPi / b.N * kTwoPi / b.N;  // two grid spacings squared
    double rho_max = 0, rho_min = 1e300;
    for (double r : b.rho) {
      rho_max = std::max(rho_max, r);
      rho_min = std::min(rho_min, r);
    }
    CHECK(rho_max == doctest::Approx(b.max_h).epsilon(tol));
    CHECK(rho_min == doctest::Approx(b.min_h).epsilon(tol));
  }
}

TEST_CASE("perimeter consistency") {
  // integral of (h'' + h) equals the polygon perimeter up to O(N^-2)
  for (int N : {64, 128, 256}) {
    ConvexBody b = build_body(support_ellipse(2.0, 1.0, N));
    double quad = 0.0, poly = 0.0;
    for (int i = 0; i < N; ++i) {
      quad += b.dS[i] * kTwoPi / N;
      poly += b.edge[i];
    }
    CHECK(std::fabs(quad - poly) / poly < 20.0 / (N * N));
  }
}

TEST_CASE("scaling covariance of all derived quantities") {
  std::mt19937 rng(7);
  SupportFn s = random_body(rng, 96);
  const double c = 2.0;
  ConvexBody b = build_body(s);
  ConvexBody bc = build_body(scale_support(s, c));
  for (int i = 0; i < s.N; ++i) {
    CHECK(bc.X[i].x == doctest::Approx(c * b.X[i].x).epsilon(1e-12));
    CHECK(bc.K[i] == doctest::Approx(b.K[i] / c).epsilon(1e-12));
    CHECK(bc.rho[i] == doctest::Approx(c * b.rho[i]).epsilon(1e-11));
    CHECK(bc.alpha[i] == doctest::Approx(b.alpha[i]).epsilon(1e-10));
    CHECK(bc.Jv[i] == doctest::Approx(c * b.Jv[i]).epsilon(1e-10));  // c^(n-1)
  }
}

TEST_CASE("winding error on inconsistent derivative data") {
  // hand-built SupportFn whose dh was not derived from h: the boundary points
  // zig-zag and the direction angle loses monotonicity
  SupportFn s;
  s.N = 64;
  s.h.assign(64, 1.0);
  s.d2h.assign(64, 0.0);
  s.dh.resize(64);
  const double dth = kTwoPi / 64;
  for (int i = 0; i < 64; ++i) s.dh[i] = (i % 2 == 0 ? dth : -dth);
  CHECK_THROWS_AS(build_body(s), WindingError);
}

TEST_CASE("even sample detection") {
  SupportFn e = support_ellipse(1.3, 1.0, 128);
  CHECK(samples_even(e.h, 1e-12));
  std::vector<FourierTerm> odd{{0, 1.0, 0.0}, {3, 0.01, 0.0}};
  SupportFn o = support_from_fourier(odd, 128);
  CHECK_FALSE(samples_even(o.h, 1e-12));
}
