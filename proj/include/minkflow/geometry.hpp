#pragma once

#include <cmath>
#include <utility>
#include <vector>

namespace minkflow {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kPi = 3.14159265358979323846264338328;

struct Vec2 {
  double x = 0.0, y = 0.0;
  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double c) const { return {c * x, c * y}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
};

// theta_i = 2*pi*i/N
std::vector<double> angle_grid(int n);

// 4th-order periodic central differences, coefficients [1,-8,0,8,-1]/(12 dt)
// and [-1,16,-30,16,-1]/(12 dt^2) on the stencil [i-2 .. i+2].
std::vector<double> periodic_d1(const std::vector<double>& f, double period = kTwoPi);
std::vector<double> periodic_d2(const std::vector<double>& f, double period = kTwoPi);

// Real trigonometric interpolant of N periodic samples (N even). Exact at the
// nodes; spectrally accurate between them for smooth data.
class TrigSeries {
 public:
  TrigSeries() = default;
  static TrigSeries fit(const std::vector<double>& samples);
  double eval(double theta) const;
  double deriv(double theta) const;
  double deriv2(double theta) const;

 private:
  int n_ = 0;
  std::vector<double> a_, b_;  // a_[k], b_[k] for k = 0 .. n/2
};

// Periodic angular samples of a support function with stencil derivatives.
struct SupportFn {
  int N = 0;
  std::vector<double> h, dh, d2h;
};

SupportFn build_support_fn(const std::vector<double>& samples);
SupportFn support_disk(double R, int N);
SupportFn support_ellipse(double a, double b, int N);

struct FourierTerm {
  int k = 0;
  double a = 0.0, b = 0.0;
};
SupportFn support_from_fourier(const std::vector<FourierTerm>& terms, int N);

SupportFn scale_support(const SupportFn& s, double c);
bool samples_even(const std::vector<double>& f, double rtol = 1e-12);
double even_gap(const std::vector<double>& f);  // max_i |f_i - f_{i+N/2}|

// Support samples plus every derived boundary quantity on the shared N-grid.
struct ConvexBody {
  SupportFn support;
  int N = 0;
  std::vector<double> theta;  // normal-angle grid (also the radial-angle grid)
  std::vector<Vec2> X;        // boundary embedding X(theta_i)
  std::vector<double> K;      // Gauss curvature 1/(h'' + h)
  std::vector<double> dS;     // surface-area-measure density h'' + h
  std::vector<double> phi;    // radial angle of X(theta_i), unwrapped, winding 2*pi
  std::vector<double> rho;    // radial function at v_j = theta_j
  std::vector<double> alpha;  // radial Gauss map alpha(v_j), alpha - v in (-pi/2, pi/2)
  std::vector<double> Jv;     // rho^n / h(alpha(v))
  std::vector<double> edge;   // |X_{i+1} - X_i|
  TrigSeries trig;            // trig interpolant of h

  double min_h = 0.0, max_h = 0.0, min_K = 0.0, max_K = 0.0;
  double diameter() const { return 2.0 * max_h; }
};

ConvexBody build_body(const SupportFn& s);

std::vector<Vec2> boundary_embedding(const SupportFn& s);
std::vector<double> curvature(const SupportFn& s);

// Evaluations between grid nodes (trig interpolant + Newton inversion).
double phi_at(const ConvexBody& b, double xi);    // normal angle -> radial angle
double alpha_at(const ConvexBody& b, double v);   // radial angle -> normal angle
double rho_at(const ConvexBody& b, double v);

// Reverse radial Gauss image of a normal-angle arc [lo, hi]; returns the
// radial-angle arc. Single closed arcs only (strictly convex bodies).
std::pair<double, double> alpha_star_arc(const ConvexBody& b, double lo, double hi);

// Polar body: radial samples 1/h_i; support recovered through the radial
// function of the primal (h_polar(v) = 1/rho(v)).
ConvexBody polar_body(const SupportFn& s);

}  // namespace minkflow
