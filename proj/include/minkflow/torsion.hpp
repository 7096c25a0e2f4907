#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "minkflow/geometry.hpp"
#include "minkflow/mesh.hpp"

namespace minkflow {

enum class GradientRecovery {
  kFlux,     // consistent boundary flux from the weak-form residual
  kAverage,  // angle-weighted incident-triangle average, normal projection
};

struct TorsionOptions {
  double eps_reg = -1.0;  // < 0: default 1e-8 * diameter^(1/(q-1))
  double tol = 1e-10;     // relative energy decrease
  int max_iter = 200;
  double lin_tol = 1e-12;  // PCG relative residual
  int lin_max_iter = -1;   // < 0: auto from system size
  GradientRecovery recovery = GradientRecovery::kFlux;
  std::ostream* log = nullptr;  // one line per Picard iteration
};

struct TorsionSolution {
  double q = 0.0;
  Mesh mesh;
  std::vector<double> u;          // nodal values, 0 on boundary nodes
  std::vector<Vec2> grad;         // per-triangle constant gradients
  std::vector<double> boundary_grad;  // |grad u| at the N boundary nodes
  double T_tilde = 0.0;           // integral of u (volume formula)
  double T_tilde_boundary = 0.0;  // Pohozaev boundary formula
  double energy = 0.0;
  int iterations = 0;
  int pcg_iterations = 0;
};

// Minimizes (1/q) * integral (|grad u|^2 + eps^2)^(q/2) - integral u over P1
// fields vanishing on the boundary, by damped Picard iteration.
TorsionSolution solve_qlaplace(const Mesh& mesh, double q, const TorsionOptions& opts);

void recover_boundary_gradient(TorsionSolution& sol, const ConvexBody& body,
                               const TorsionOptions& opts);

// (T_tilde by volume formula, T_tilde by boundary formula); fills both fields.
std::pair<double, double> rigidity(TorsionSolution& sol, const ConvexBody& body);

// mesh + solve + boundary gradient + rigidity
TorsionSolution solve_torsion(const ConvexBody& body, double q, double target_size,
                              const TorsionOptions& opts = {});

// Per-node residuals of the boundary Hessian identities (n = 2): tangential
// u_tt = -K |grad u| and normal u_nn = ((K |grad u| (h''+h)) - |grad u|^(2-q))/(q-1).
// Diagnostic only; second derivatives come from a least-squares quadratic fit
// over the nodal patch near each boundary node.
struct BoundaryIdentityReport {
  std::vector<double> tangential;  // fitted u_tt per boundary node
  std::vector<double> normal;      // fitted u_nn per boundary node
  std::vector<double> res_tangential, res_normal;
  double mean_tangential = 0.0, mean_normal = 0.0;
  double max_res_tangential = 0.0, max_res_normal = 0.0;
  double mean_res_tangential = 0.0, mean_res_normal = 0.0;
};

BoundaryIdentityReport boundary_identity_check(const TorsionSolution& sol,
                                               const ConvexBody& body, double q);

}  // namespace minkflow
