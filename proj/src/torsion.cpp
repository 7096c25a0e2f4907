#include "minkflow/torsion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "minkflow/errors.hpp"
#include "minkflow/interp.hpp"

namespace minkflow {

namespace {

struct P1System {
  int n_nodes = 0;
  int n_interior = 0;
  std::vector<int> interior_of_node;  // -1 for boundary nodes
  std::vector<int> node_of_interior;
  // CSR pattern on interior unknowns
  std::vector<int> row_ptr, col;
  std::vector<double> val;
  std::vector<double> load;      // full nodal load integral phi_i
  std::vector<double> area;      // per-triangle area
  std::vector<std::array<Vec2, 3>> grad_phi;  // per-triangle basis gradients
};

P1System build_system(const Mesh& mesh) {
  P1System sys;
  sys.n_nodes = static_cast<int>(mesh.v.size());
  sys.interior_of_node.assign(sys.n_nodes, -1);
  for (int i = mesh.n_boundary; i < sys.n_nodes; ++i) {
    sys.interior_of_node[i] = static_cast<int>(sys.node_of_interior.size());
    sys.node_of_interior.push_back(i);
  }
  sys.n_interior = static_cast<int>(sys.node_of_interior.size());
  if (sys.n_interior == 0) throw MeshFailure("mesh has no interior nodes");

  const int nt = static_cast<int>(mesh.tri.size());
  sys.area.resize(nt);
  sys.grad_phi.resize(nt);
  sys.load.assign(sys.n_nodes, 0.0);
  for (int t = 0; t < nt; ++t) {
    const auto& tr = mesh.tri[t];
    const Vec2 a = mesh.v[tr[0]], b = mesh.v[tr[1]], c = mesh.v[tr[2]];
    const double twice = (b - a).cross(c - a);
    if (!(twice > 0.0)) throw MeshFailure("degenerate or misoriented triangle");
    sys.area[t] = 0.5 * twice;
    // grad of barycentric basis: rotated opposite edges / (2 area)
    sys.grad_phi[t][0] = Vec2{b.y - c.y, c.x - b.x} * (1.0 / twice);
    sys.grad_phi[t][1] = Vec2{c.y - a.y, a.x - c.x} * (1.0 / twice);
    sys.grad_phi[t][2] = Vec2{a.y - b.y, b.x - a.x} * (1.0 / twice);
    for (int k = 0; k < 3; ++k) sys.load[tr[k]] += sys.area[t] / 3.0;
  }

  // CSR pattern from node adjacency (interior block only)
  std::vector<std::vector<int>> nbr(sys.n_interior);
  for (const auto& tr : mesh.tri)
    for (int k = 0; k < 3; ++k) {
      const int i = sys.interior_of_node[tr[k]];
      if (i < 0) continue;
      for (int l = 0; l < 3; ++l) {
        const int j = sys.interior_of_node[tr[l]];
        if (j >= 0) nbr[i].push_back(j);
      }
    }
  sys.row_ptr.assign(sys.n_interior + 1, 0);
  for (int i = 0; i < sys.n_interior; ++i) {
    auto& v = nbr[i];
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    sys.row_ptr[i + 1] = sys.row_ptr[i] + static_cast<int>(v.size());
  }
  sys.col.resize(sys.row_ptr.back());
  for (int i = 0; i < sys.n_interior; ++i)
    std::copy(nbr[i].begin(), nbr[i].end(), sys.col.begin() + sys.row_ptr[i]);
  sys.val.assign(sys.col.size(), 0.0);
  return sys;
}

void assemble(const Mesh& mesh, const P1System& sys, const std::vector<double>& w,
              std::vector<double>& val) {
  std::fill(val.begin(), val.end(), 0.0);
  auto add = [&](int i, int j, double v) {
    const int lo = sys.row_ptr[i], hi = sys.row_ptr[i + 1];
    const int* base = sys.col.data();
    const int* it = std::lower_bound(base + lo, base + hi, j);
    val[it - base] += v;
  };
  const int nt = static_cast<int>(mesh.tri.size());
  for (int t = 0; t < nt; ++t) {
    const auto& tr = mesh.tri[t];
    const double c = w[t] * sys.area[t];
    for (int k = 0; k < 3; ++k) {
      const int i = sys.interior_of_node[tr[k]];
      if (i < 0) continue;
      for (int l = 0; l < 3; ++l) {
        const int j = sys.interior_of_node[tr[l]];
        if (j < 0) continue;
        add(i, j, c * sys.grad_phi[t][k].dot(sys.grad_phi[t][l]));
      }
    }
  }
}

// Jacobi-preconditioned conjugate gradient with fixed summation order.
int pcg(const P1System& sys, const std::vector<double>& b, std::vector<double>& x,
        double tol, int max_iter) {
  const int n = sys.n_interior;
  std::vector<double> r(n), z(n), p(n), Ap(n), dinv(n);
  for (int i = 0; i < n; ++i) {
    double d = 0.0;
    for (int k = sys.row_ptr[i]; k < sys.row_ptr[i + 1]; ++k)
      if (sys.col[k] == i) d = sys.val[k];
    if (!(d > 0.0)) throw SingularSystem("non-positive diagonal in stiffness matrix");
    dinv[i] = 1.0 / d;
  }
  auto spmv = [&](const std::vector<double>& v, std::vector<double>& out) {
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int k = sys.row_ptr[i]; k < sys.row_ptr[i + 1]; ++k)
        acc += sys.val[k] * v[sys.col[k]];
      out[i] = acc;
    }
  };
  spmv(x, Ap);
  double bnorm2 = 0.0;
  for (int i = 0; i < n; ++i) {
    r[i] = b[i] - Ap[i];
    bnorm2 += b[i] * b[i];
  }
  const double stop2 = tol * tol * std::max(bnorm2, 1e-300);
  double rz = 0.0;
  for (int i = 0; i < n; ++i) {
    z[i] = dinv[i] * r[i];
    p[i] = z[i];
    rz += r[i] * z[i];
  }
  int it = 0;
  for (; it < max_iter; ++it) {
    double r2 = 0.0;
    for (int i = 0; i < n; ++i) r2 += r[i] * r[i];
    if (r2 <= stop2) break;
    spmv(p, Ap);
    double pAp = 0.0;
    for (int i = 0; i < n; ++i) pAp += p[i] * Ap[i];
    if (!(pAp > 0.0)) throw SingularSystem("PCG lost positive definiteness");
    const double alpha = rz / pAp;
    for (int i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
    }
    double rz_new = 0.0;
    for (int i = 0; i < n; ++i) {
      z[i] = dinv[i] * r[i];
      rz_new += r[i] * z[i];
    }
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  if (it >= max_iter) throw NoConvergence("PCG did not reach tolerance");
  return it;
}

void triangle_gradients(const Mesh& mesh, const P1System& sys,
                        const std::vector<double>& u, std::vector<Vec2>& g) {
  const int nt = static_cast<int>(mesh.tri.size());
  g.resize(nt);
  for (int t = 0; t < nt; ++t) {
    const auto& tr = mesh.tri[t];
    Vec2 acc{0.0, 0.0};
    for (int k = 0; k < 3; ++k) acc = acc + sys.grad_phi[t][k] * u[tr[k]];
    g[t] = acc;
  }
}

double energy_of(const Mesh& mesh, const P1System& sys, const std::vector<double>& u,
                 const std::vector<Vec2>& g, double q, double eps2) {
  double e = 0.0;
  const int nt = static_cast<int>(mesh.tri.size());
  for (int t = 0; t < nt; ++t) {
    const double g2 = g[t].dot(g[t]) + eps2;
    e += sys.area[t] * std::pow(g2, 0.5 * q) / q;
  }
  double lin = 0.0;
  for (int i = 0; i < sys.n_nodes; ++i) lin += sys.load[i] * u[i];
  return e - lin;
}

}  // namespace

TorsionSolution solve_qlaplace(const Mesh& mesh, double q, const TorsionOptions& opts) {
  if (!(q > 1.0)) throw ConfigError("torsion exponent must satisfy q > 1");
  TorsionSolution sol;
  sol.q = q;
  sol.mesh = mesh;

  P1System sys = build_system(mesh);
  const int nt = static_cast<int>(mesh.tri.size());

  double diam = 0.0;
  for (int i = 0; i < mesh.n_boundary / 2; ++i)
    diam = std::max(diam,
                    (mesh.v[i] - mesh.v[i + mesh.n_boundary / 2]).norm());
  const double eps =
      opts.eps_reg > 0.0 ? opts.eps_reg : 1e-8 * std::pow(diam, 1.0 / (q - 1.0));
  const double eps2 = eps * eps;

  std::vector<double> b(sys.n_interior);
  for (int i = 0; i < sys.n_interior; ++i) b[i] = sys.load[sys.node_of_interior[i]];
  const int lin_max = opts.lin_max_iter > 0
                          ? opts.lin_max_iter
                          : 200 + 60 * static_cast<int>(std::sqrt(sys.n_interior));

  sol.u.assign(sys.n_nodes, 0.0);
  std::vector<double> xi(sys.n_interior, 0.0);
  std::vector<double> w(nt, 1.0);  // first iterate solves the plain Poisson problem
  triangle_gradients(mesh, sys, sol.u, sol.grad);
  double e_prev = energy_of(mesh, sys, sol.u, sol.grad, q, eps2);

  const bool linear = (q == 2.0);
  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    if (!linear && iter > 0) {
      double wmin = std::numeric_limits<double>::infinity(), wmax = 0.0;
      for (int t = 0; t < nt; ++t) {
        const double g2 = sol.grad[t].dot(sol.grad[t]) + eps2;
        w[t] = std::pow(g2, 0.5 * (q - 2.0));
        if (!std::isfinite(w[t])) throw SingularSystem("weight overflow");
        wmin = std::min(wmin, w[t]);
        wmax = std::max(wmax, w[t]);
      }
      if (wmin <= 0.0 || wmax / wmin > 1e28)
        throw SingularSystem("weight range exceeds 1e28; eps_reg too small for q");
    }
    assemble(mesh, sys, w, sys.val);
    std::vector<double> xnew(xi);
    sol.pcg_iterations += pcg(sys, b, xnew, opts.lin_tol, lin_max);

    // damped update: halve towards the previous iterate while energy rises
    double alpha = 1.0;
    std::vector<double> u_try(sys.n_nodes, 0.0);
    std::vector<Vec2> g_try;
    double e_try = 0.0;
    for (int halv = 0; halv <= 40; ++halv) {
      for (int i = 0; i < sys.n_interior; ++i)
        u_try[sys.node_of_interior[i]] = xi[i] + alpha * (xnew[i] - xi[i]);
      triangle_gradients(mesh, sys, u_try, g_try);
      e_try = energy_of(mesh, sys, u_try, g_try, q, eps2);
      if (e_try <= e_prev + 1e-14 * std::fabs(e_prev) || linear) break;
      alpha *= 0.5;
    }
    for (int i = 0; i < sys.n_interior; ++i)
      xi[i] = xi[i] + alpha * (xnew[i] - xi[i]);
    sol.u.swap(u_try);
    sol.grad.swap(g_try);

    const double rel = std::fabs(e_prev - e_try) / std::max(std::fabs(e_try), 1e-300);
    if (opts.log)
      (*opts.log) << "picard " << iter + 1 << " energy " << e_try << " relchange "
                  << rel << " damping " << alpha << "\n";
    e_prev = e_try;
    if (linear) {
      ++iter;
      break;
    }
    if (iter > 0 && rel < opts.tol) {
      ++iter;
      break;
    }
  }
  if (!linear && iter >= opts.max_iter)
    throw NoConvergence("Picard hit max_iter with energy still decreasing");
  sol.iterations = iter;
  sol.energy = e_prev;

  double min_u = 0.0;
  for (int i = 0; i < sys.n_nodes; ++i) min_u = std::min(min_u, sol.u[i]);
  if (min_u < -1e-10)
    throw NoConvergence("maximum principle violated: min u = " + std::to_string(min_u));
  return sol;
}

void recover_boundary_gradient(TorsionSolution& sol, const ConvexBody& body,
                               const TorsionOptions& opts) {
  const Mesh& mesh = sol.mesh;
  const int N = mesh.n_boundary;
  const double q = sol.q;
  sol.boundary_grad.assign(N, 0.0);

  if (opts.recovery == GradientRecovery::kAverage) {
    // angle-weighted average of incident-triangle gradients, projected on the
    // outward normal
    std::vector<Vec2> acc(N, {0.0, 0.0});
    std::vector<double> wsum(N, 0.0);
    for (size_t t = 0; t < mesh.tri.size(); ++t) {
      const auto& tr = mesh.tri[t];
      for (int k = 0; k < 3; ++k) {
        const int i = tr[k];
        if (i >= N) continue;
        const Vec2 e1 = mesh.v[tr[(k + 1) % 3]] - mesh.v[i];
        const Vec2 e2 = mesh.v[tr[(k + 2) % 3]] - mesh.v[i];
        const double ang =
            std::fabs(std::atan2(e1.cross(e2), e1.dot(e2)));
        acc[i] = acc[i] + sol.grad[t] * ang;
        wsum[i] += ang;
      }
    }
    for (int i = 0; i < N; ++i) {
      const double th = body.theta[i];
      const Vec2 nu{std::cos(th), std::sin(th)};
      const Vec2 g = acc[i] * (1.0 / wsum[i]);
      const double v = std::max(0.0, -g.dot(nu));
      if (v <= 1e-12)
        throw DegenerateGradient("boundary gradient vanished at node " +
                                 std::to_string(i));
      sol.boundary_grad[i] = v;
    }
    return;
  }

  // Consistent boundary flux: for boundary test functions the weak-form
  // residual equals the outward flux integral of |grad u|^(q-2) grad u . nu,
  // which is -|grad u|^(q-1) on the torsion boundary. Solving the periodic
  // boundary mass system recovers the nodal trace.
  const double eps2 = 0.0;  // final weights, consistent with the solved operator
  std::vector<double> r(N, 0.0);
  for (size_t t = 0; t < mesh.tri.size(); ++t) {
    const auto& tr = mesh.tri[t];
    const Vec2 a = mesh.v[tr[0]], b = mesh.v[tr[1]], c = mesh.v[tr[2]];
    const double twice = (b - a).cross(c - a);
    const double area = 0.5 * twice;
    const Vec2 gp[3] = {Vec2{b.y - c.y, c.x - b.x} * (1.0 / twice),
                        Vec2{c.y - a.y, a.x - c.x} * (1.0 / twice),
                        Vec2{a.y - b.y, b.x - a.x} * (1.0 / twice)};
    const double g2 = sol.grad[t].dot(sol.grad[t]) + eps2;
    const double w = q == 2.0 ? 1.0 : std::pow(g2, 0.5 * (q - 2.0));
    for (int k = 0; k < 3; ++k) {
      const int i = tr[k];
      if (i >= N) continue;
      r[i] += w * area * sol.grad[t].dot(gp[k]) - area / 3.0;
    }
  }
  // periodic boundary mass matrix (edges of the boundary loop)
  std::vector<double> lo(N), di(N), up(N), rhs(N);
  for (int i = 0; i < N; ++i) {
    const double el = body.edge[(i + N - 1) % N];
    const double er = body.edge[i];
    lo[i] = el / 6.0;
    di[i] = (el + er) / 3.0;
    up[i] = er / 6.0;
    rhs[i] = -r[i];
  }
  std::vector<double> flux = solve_cyclic_tridiag(lo, di, up, rhs);
  for (int i = 0; i < N; ++i) {
    if (flux[i] <= 1e-12)
      throw DegenerateGradient("boundary flux vanished at node " + std::to_string(i));
    sol.boundary_grad[i] = std::pow(flux[i], 1.0 / (q - 1.0));
  }
}

std::pair<double, double> rigidity(TorsionSolution& sol, const ConvexBody& body) {
  const Mesh& mesh = sol.mesh;
  double vol = 0.0;
  for (size_t t = 0; t < mesh.tri.size(); ++t) {
    const auto& tr = mesh.tri[t];
    const Vec2 a = mesh.v[tr[0]], b = mesh.v[tr[1]], c = mesh.v[tr[2]];
    const double area = 0.5 * (b - a).cross(c - a);
    vol += area * (sol.u[tr[0]] + sol.u[tr[1]] + sol.u[tr[2]]) / 3.0;
  }
  const double q = sol.q;
  const int n = 2;
  const double ba = (q - 1.0) / (q + n * (q - 1.0));
  const double dth = kTwoPi / body.N;
  double bnd = 0.0;
  for (int i = 0; i < body.N; ++i)
    bnd += body.support.h[i] * std::pow(sol.boundary_grad[i], q) * body.dS[i];
  bnd *= ba * dth;
  sol.T_tilde = vol;
  sol.T_tilde_boundary = bnd;
  return {vol, bnd};
}

TorsionSolution solve_torsion(const ConvexBody& body, double q, double target_size,
                              const TorsionOptions& opts) {
  Mesh mesh = generate_mesh(body, target_size);
  TorsionSolution sol = solve_qlaplace(mesh, q, opts);
  recover_boundary_gradient(sol, body, opts);
  rigidity(sol, body);
  return sol;
}

BoundaryIdentityReport boundary_identity_check(const TorsionSolution& sol,
                                               const ConvexBody& body, double q) {
  const Mesh& mesh = sol.mesh;
  const int N = mesh.n_boundary;
  BoundaryIdentityReport rep;
  rep.tangential.assign(N, 0.0);
  rep.normal.assign(N, 0.0);
  rep.res_tangential.assign(N, 0.0);
  rep.res_normal.assign(N, 0.0);

  // patch radius: a few mesh lengths around each boundary node
  double hloc = 0.0;
  for (int i = 0; i < N; ++i) hloc = std::max(hloc, body.edge[i]);
  const double rad = std::max(3.2 * hloc, 3.2 * mesh.quality.max_edge * 0.5);

  const int M = static_cast<int>(mesh.v.size());
  for (int i = 0; i < N; ++i) {
    const Vec2 p = mesh.v[i];
    const double th = body.theta[i];
    const Vec2 nu{std::cos(th), std::sin(th)};
    const Vec2 ta{-std::sin(th), std::cos(th)};
    // least-squares quadratic fit of u on the patch in (tangent, normal)
    // coordinates: u = c0 + c1 s + c2 t + c3 s^2/2 + c4 s t + c5 t^2/2
    double A[6][6] = {};
    double rhs[6] = {};
    int count = 0;
    for (int j = 0; j < M; ++j) {
      const Vec2 d = mesh.v[j] - p;
      if (d.norm() > rad) continue;
      const double s = d.dot(ta), t = d.dot(nu);
      const double row[6] = {1.0, s, t, 0.5 * s * s, s * t, 0.5 * t * t};
      for (int a = 0; a < 6; ++a) {
        for (int bcol = 0; bcol < 6; ++bcol) A[a][bcol] += row[a] * row[bcol];
        rhs[a] += row[a] * sol.u[j];
      }
      ++count;
    }
    if (count < 10) throw MeshFailure("patch too small for identity check");
    // Gaussian elimination with partial pivoting on the 6x6 normal equations
    double M6[6][7];
    for (int a = 0; a < 6; ++a) {
      for (int bcol = 0; bcol < 6; ++bcol) M6[a][bcol] = A[a][bcol];
      M6[a][6] = rhs[a];
    }
    for (int c = 0; c < 6; ++c) {
      int piv = c;
      for (int rr = c + 1; rr < 6; ++rr)
        if (std::fabs(M6[rr][c]) > std::fabs(M6[piv][c])) piv = rr;
      std::swap(M6[c], M6[piv]);
      if (std::fabs(M6[c][c]) < 1e-300) throw SingularSystem("singular patch fit");
      for (int rr = c + 1; rr < 6; ++rr) {
        const double f = M6[rr][c] / M6[c][c];
        for (int cc = c; cc < 7; ++cc) M6[rr][cc] -= f * M6[c][cc];
      }
    }
    double coef[6];
    for (int c = 5; c >= 0; --c) {
      double acc = M6[c][6];
      for (int cc = c + 1; cc < 6; ++cc) acc -= M6[c][cc] * coef[cc];
      coef[c] = acc / M6[c][c];
    }
    const double u_tt = coef[3];
    const double u_nn = coef[5];
    const double g = sol.boundary_grad[i];
    const double K = body.K[i];
    // identities (n = 2, cofactor scalar = 1)
    const double pred_t = -K * g;
    const double pred_n = (K * g * body.dS[i] - std::pow(g, 2.0 - q)) / (q - 1.0);
    rep.tangential[i] = u_tt;
    rep.normal[i] = u_nn;
    rep.res_tangential[i] = u_tt - pred_t;
    rep.res_normal[i] = u_nn - pred_n;
  }
  auto finish = [&](const std::vector<double>& v, const std::vector<double>& res,
                    double& mean, double& maxr, double& meanr) {
    mean = 0.0;
    maxr = 0.0;
    meanr = 0.0;
    for (int i = 0; i < N; ++i) {
      mean += v[i];
      maxr = std::max(maxr, std::fabs(res[i]));
      meanr += std::fabs(res[i]);
    }
    mean /= N;
    meanr /= N;
  };
  finish(rep.tangential, rep.res_tangential, rep.mean_tangential,
         rep.max_res_tangential, rep.mean_res_tangential);
  finish(rep.normal, rep.res_normal, rep.mean_normal, rep.max_res_normal,
         rep.mean_res_normal);
  return rep;
}

}  // namespace minkflow
