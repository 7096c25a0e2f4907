#include "minkflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "minkflow/errors.hpp"

namespace minkflow {

std::vector<double> angle_grid(int n) {
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = kTwoPi * i / n;
  return t;
}

std::vector<double> periodic_d1(const std::vector<double>& f, double period) {
  const int n = static_cast<int>(f.size());
  const double dt = period / n;
  std::vector<double> out(n);
  auto at = [&](int i) { return f[(i % n + n) % n]; };
  const double c = 1.0 / (12.0 * dt);
  for (int i = 0; i < n; ++i)
    out[i] = (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) * c;
  return out;
}

std::vector<double> periodic_d2(const std::vector<double>& f, double period) {
  const int n = static_cast<int>(f.size());
  const double dt = period / n;
  std::vector<double> out(n);
  auto at = [&](int i) { return f[(i % n + n) % n]; };
  const double c = 1.0 / (12.0 * dt * dt);
  for (int i = 0; i < n; ++i)
    out[i] = (-at(i - 2) + 16.0 * at(i - 1) - 30.0 * at(i) + 16.0 * at(i + 1) -
              at(i + 2)) * c;
  return out;
}

TrigSeries TrigSeries::fit(const std::vector<double>& samples) {
  TrigSeries t;
  const int n = static_cast<int>(samples.size());
  t.n_ = n;
  const int half = n / 2;
  t.a_.assign(half + 1, 0.0);
  t.b_.assign(half + 1, 0.0);
  for (int i = 0; i < n; ++i) {
    const double th = kTwoPi * i / n;
    const double c1 = std::cos(th), s1 = std::sin(th);
    double ck = 1.0, sk = 0.0;  // cos(k th), sin(k th), k = 0
    const double v = samples[i];
    t.a_[0] += v;
    for (int k = 1; k <= half; ++k) {
      const double cn = ck * c1 - sk * s1;
      const double sn = sk * c1 + ck * s1;
      ck = cn;
      sk = sn;
      t.a_[k] += v * ck;
      t.b_[k] += v * sk;
    }
  }
  t.a_[0] /= n;
  for (int k = 1; k < half; ++k) {
    t.a_[k] *= 2.0 / n;
    t.b_[k] *= 2.0 / n;
  }
  t.a_[half] /= n;
  t.b_[half] = 0.0;
  return t;
}

double TrigSeries::eval(double theta) const {
  const int half = n_ / 2;
  const double c1 = std::cos(theta), s1 = std::sin(theta);
  double ck = 1.0, sk = 0.0;
  double acc = a_[0];
  for (int k = 1; k <= half; ++k) {
    const double cn = ck * c1 - sk * s1;
    const double sn = sk * c1 + ck * s1;
    ck = cn;
    sk = sn;
    acc += a_[k] * ck + b_[k] * sk;
  }
  return acc;
}

double TrigSeries::deriv(double theta) const {
  const int half = n_ / 2;
  const double c1 = std::cos(theta), s1 = std::sin(theta);
  double ck = 1.0, sk = 0.0;
  double acc = 0.0;
  for (int k = 1; k <= half; ++k) {
    const double cn = ck * c1 - sk * s1;
    const double sn = sk * c1 + ck * s1;
    ck = cn;
    sk = sn;
    acc += k * (-a_[k] * sk + b_[k] * ck);
  }
  return acc;
}

double TrigSeries::deriv2(double theta) const {
  const int half = n_ / 2;
  const double c1 = std::cos(theta), s1 = std::sin(theta);
  double ck = 1.0, sk = 0.0;
  double acc = 0.0;
  for (int k = 1; k <= half; ++k) {
    const double cn = ck * c1 - sk * s1;
    const double sn = sk * c1 + ck * s1;
    ck = cn;
    sk = sn;
    acc -= double(k) * k * (a_[k] * ck + b_[k] * sk);
  }
  return acc;
}

SupportFn build_support_fn(const std::vector<double>& samples) {
  const int n = static_cast<int>(samples.size());
  if (n < 16 || n % 2 != 0)
    throw BadGridError("grid size must be even and >= 16, got " + std::to_string(n));
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(samples[i]))
      throw NonPositiveError("support sample " + std::to_string(i) + " is not finite");
    if (samples[i] <= 0.0)
      throw NonPositiveError("support sample " + std::to_string(i) + " is not positive");
  }
  SupportFn s;
  s.N = n;
  s.h = samples;
  s.dh = periodic_d1(samples);
  s.d2h = periodic_d2(samples);
  for (int i = 0; i < n; ++i) {
    if (!(s.d2h[i] + s.h[i] > 0.0))
      throw NonConvexError("h'' + h <= 0 at node " + std::to_string(i));
  }
  return s;
}

SupportFn support_disk(double R, int N) {
  return build_support_fn(std::vector<double>(N, R));
}

SupportFn support_ellipse(double a, double b, int N) {
  std::vector<double> h(N);
  for (int i = 0; i < N; ++i) {
    const double t = kTwoPi * i / N;
    const double c = std::cos(t), s = std::sin(t);
    h[i] = std::sqrt(a * a * c * c + b * b * s * s);
  }
  return build_support_fn(h);
}

SupportFn support_from_fourier(const std::vector<FourierTerm>& terms, int N) {
  std::vector<double> h(N, 0.0);
  for (int i = 0; i < N; ++i) {
    const double t = kTwoPi * i / N;
    double acc = 0.0;
    for (const auto& f : terms) {
      if (f.k == 0)
        acc += f.a;
      else
        acc += f.a * std::cos(f.k * t) + f.b * std::sin(f.k * t);
    }
    h[i] = acc;
  }
  return build_support_fn(h);
}

SupportFn scale_support(const SupportFn& s, double c) {
  if (!(c > 0.0)) throw NonPositiveError("scale factor must be positive");
  std::vector<double> h(s.h);
  for (auto& v : h) v *= c;
  return build_support_fn(h);
}

double even_gap(const std::vector<double>& f) {
  const int n = static_cast<int>(f.size());
  double g = 0.0;
  for (int i = 0; i < n / 2; ++i) g = std::max(g, std::fabs(f[i] - f[i + n / 2]));
  return g;
}

bool samples_even(const std::vector<double>& f, double rtol) {
  double scale = 0.0;
  for (double v : f) scale = std::max(scale, std::fabs(v));
  return even_gap(f) <= rtol * std::max(scale, 1e-300);
}

std::vector<Vec2> boundary_embedding(const SupportFn& s) {
  std::vector<Vec2> X(s.N);
  for (int i = 0; i < s.N; ++i) {
    const double t = kTwoPi * i / s.N;
    const double c = std::cos(t), si = std::sin(t);
    X[i] = {s.h[i] * c - s.dh[i] * si, s.h[i] * si + s.dh[i] * c};
  }
  return X;
}

std::vector<double> curvature(const SupportFn& s) {
  std::vector<double> K(s.N);
  for (int i = 0; i < s.N; ++i) {
    const double d = s.d2h[i] + s.h[i];
    if (!(d > 0.0)) throw NonConvexError("h'' + h <= 0 at node " + std::to_string(i));
    K[i] = 1.0 / d;
  }
  return K;
}

namespace {

double wrap_pi(double a) {
  a = std::fmod(a + kPi, kTwoPi);
  if (a < 0) a += kTwoPi;
  return a - kPi;
}

// Solves theta + atan2(h'(theta), h(theta)) = w. The offset atan2 term lies in
// (-pi/2, pi/2) for positive h, so the root is bracketed by w -+ pi/2.
double invert_radial_angle(const TrigSeries& trig, double w) {
  auto phi = [&](double th) { return th + std::atan2(trig.deriv(th), trig.eval(th)); };
  auto dphi = [&](double th) {
    const double h = trig.eval(th), d1 = trig.deriv(th), d2 = trig.deriv2(th);
    const double r2 = h * h + d1 * d1;
    return h * (h + d2) / r2;
  };
  double lo = w - kPi / 2 - 0.05, hi = w + kPi / 2 + 0.05;
  double th = w;
  for (int it = 0; it < 100; ++it) {
    const double f = phi(th) - w;
    if (std::fabs(f) < 1e-14) return th;
    if (f > 0)
      hi = std::min(hi, th);
    else
      lo = std::max(lo, th);
    const double dp = dphi(th);
    if (!(dp > 0.0)) throw WindingError("radial-angle map is not increasing");
    double next = th - f / dp;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    th = next;
  }
  throw WindingError("radial-angle inversion did not converge");
}

}  // namespace

ConvexBody build_body(const SupportFn& s) {
  ConvexBody b;
  b.support = s;
  b.N = s.N;
  b.theta = angle_grid(s.N);
  b.X = boundary_embedding(s);
  b.dS.resize(s.N);
  b.K.resize(s.N);
  for (int i = 0; i < s.N; ++i) {
    b.dS[i] = s.d2h[i] + s.h[i];
    b.K[i] = 1.0 / b.dS[i];
  }
  b.edge.resize(s.N);
  for (int i = 0; i < s.N; ++i) b.edge[i] = (b.X[(i + 1) % s.N] - b.X[i]).norm();

  // Unwrapped direction angle of the boundary points; strict convexity makes
  // it strictly increasing with total winding 2*pi.
  b.phi.resize(s.N);
  double prev_raw = std::atan2(b.X[0].y, b.X[0].x);
  b.phi[0] = prev_raw;
  for (int i = 1; i < s.N; ++i) {
    const double raw = std::atan2(b.X[i].y, b.X[i].x);
    const double d = wrap_pi(raw - prev_raw);
    if (!(d > 0.0)) throw WindingError("phi not increasing at node " + std::to_string(i));
    b.phi[i] = b.phi[i - 1] + d;
    prev_raw = raw;
  }
  const double close = wrap_pi(std::atan2(b.X[0].y, b.X[0].x) - prev_raw);
  if (!(close > 0.0) ||
      std::fabs(b.phi[s.N - 1] + close - (b.phi[0] + kTwoPi)) > 1e-9)
    throw WindingError("phi does not wind by 2*pi");

  b.trig = TrigSeries::fit(s.h);
  b.rho.resize(s.N);
  b.alpha.resize(s.N);
  b.Jv.resize(s.N);
  for (int j = 0; j < s.N; ++j) {
    const double v = b.theta[j];
    const double th = invert_radial_angle(b.trig, v);
    const double h = b.trig.eval(th), d1 = b.trig.deriv(th);
    b.alpha[j] = th;
    b.rho[j] = std::hypot(h, d1);
    b.Jv[j] = b.rho[j] * b.rho[j] / h;  // n = 2
  }

  b.min_h = *std::min_element(s.h.begin(), s.h.end());
  b.max_h = *std::max_element(s.h.begin(), s.h.end());
  b.min_K = *std::min_element(b.K.begin(), b.K.end());
  b.max_K = *std::max_element(b.K.begin(), b.K.end());
  return b;
}

double phi_at(const ConvexBody& b, double xi) {
  return xi + std::atan2(b.trig.deriv(xi), b.trig.eval(xi));
}

double alpha_at(const ConvexBody& b, double v) {
  return invert_radial_angle(b.trig, v);
}

double rho_at(const ConvexBody& b, double v) {
  const double th = invert_radial_angle(b.trig, v);
  return std::hypot(b.trig.eval(th), b.trig.deriv(th));
}

std::pair<double, double> alpha_star_arc(const ConvexBody& b, double lo, double hi) {
  if (!(hi > lo)) throw Error("arc must have positive length");
  if (hi - lo > kTwoPi) throw Error("arc longer than the full circle");
  return {phi_at(b, lo), phi_at(b, hi)};
}

ConvexBody polar_body(const SupportFn& s) {
  ConvexBody primal = build_body(s);
  std::vector<double> hp(s.N);
  for (int j = 0; j < s.N; ++j) hp[j] = 1.0 / primal.rho[j];
  return build_body(build_support_fn(hp));
}

}  // namespace minkflow
