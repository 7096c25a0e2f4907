#pragma once

#include <string>
#include <vector>

#include "minkflow/geometry.hpp"
#include "minkflow/torsion.hpp"

namespace minkflow {

// b/a = (q-1)/(q + n(q-1)) = 1/(n + q/(q-1))
double ba_constant(double q, int n = 2);

// Density of the q-torsional measure in the normal angle: |grad u|^q (h''+h).
std::vector<double> q_torsional_measure_density(const ConvexBody& body,
                                                const TorsionSolution& sol);

// The dual q-torsional measure in both representations on the shared grid.
struct DualMeasureDensity {
  double p = 0.0, q = 0.0;
  int n = 2;
  double ba = 0.0;
  std::vector<double> density_v;  // (b/a) rho(v)^p |grad u(r(v))|^q
  std::vector<double> density_x;  // (b/a) (|grad h|^2+h^2)^((p-n)/2) h |grad u|^q (h''+h)
  double total_v = 0.0, total_x = 0.0;
  double gap() const;  // relative cross-representation gap of the totals
};

DualMeasureDensity dual_measure(const ConvexBody& body, const TorsionSolution& sol,
                                double p);

// Measure of a normal-angle arc by both routes: through the reverse radial
// Gauss image of the arc (v-density) and directly (x-density).
struct ArcMeasure {
  double lo = 0.0, hi = 0.0;
  double value_v = 0.0, value_x = 0.0;
  double gap() const;
};

ArcMeasure measure_of_arc(const ConvexBody& body, const TorsionSolution& sol,
                          double p, double lo, double hi);

// Dual mixed rigidity (b/a) * integral rho2^p rho1^(n-p) |grad u1(r1(v))|^q dv.
double dual_mixed(const ConvexBody& body1, const TorsionSolution& sol1,
                  const ConvexBody& body2, double p);

// Logarithmic perturbation families.
enum class FamilyMode {
  kWulffLog,   // log h_s = log h + s f
  kRadialLog,  // log rho_s = log rho + s g
};

struct PerturbationFamily {
  FamilyMode mode = FamilyMode::kWulffLog;
  SupportFn base;
  std::vector<double> direction;
};

// Realizes the family member at parameter s as a valid support function.
// Throws NonConvexPerturbation if convexity fails.
SupportFn realize_family(const PerturbationFamily& family, double s);

// Finite-difference referee for the variational formulas. For T_tilde the
// tested prediction is integral g rho^n |grad u|^q dv; for Q_tilde both the
// claimed p(1+q) * integral f dQ and the scaling-law value (p + q/(q-1)) Q
// (constant direction only) are reported.
struct RefereeReport {
  std::string target;  // "T_tilde" or "Q_tilde"
  double s = 0.0;
  double q = 0.0, p = 0.0;
  double base_value = 0.0;
  double d = 0.0, d_half = 0.0, richardson = 0.0;
  bool direction_constant = false;
  double prediction_variational = 0.0;  // Prop.-style integral (T referee)
  double prediction_paper = 0.0;        // p(1+q) * integral f dQ (Q referee)
  double prediction_scaling = 0.0;      // only for constant direction
  bool has_scaling = false;
};

RefereeReport referee_T(const SupportFn& base, const std::vector<double>& direction,
                        double s, double q, double target_size,
                        const TorsionOptions& opts = {});

RefereeReport referee_Q(const SupportFn& base, const std::vector<double>& direction,
                        double s, double q, double p, double target_size,
                        const TorsionOptions& opts = {});

}  // namespace minkflow
