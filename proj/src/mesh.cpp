#include "minkflow/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>

#include "minkflow/errors.hpp"

namespace minkflow {

namespace {

// Deterministic per-lattice-point jitter in [-1, 1]^2; de-ties cocircular
// lattice configurations. Mirrored points get mirrored jitter so centrally
// symmetric bodies produce centrally symmetric point sets.
Vec2 lattice_jitter(long i, long j) {
  if (j < 0 || (j == 0 && i < 0)) {
    Vec2 v = lattice_jitter(-i, -j);
    return {-v.x, -v.y};
  }
  if (i == 0 && j == 0) return {0.0, 0.0};
  auto mix = [](uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  const uint64_t h = mix((uint64_t(uint32_t(i)) << 32) ^ uint64_t(uint32_t(j)));
  const double u1 = double(h & 0xffffffffULL) / 4294967295.0;
  const double u2 = double(h >> 32) / 4294967295.0;
  return {2.0 * u1 - 1.0, 2.0 * u2 - 1.0};
}

double orient(Vec2 a, Vec2 b, Vec2 c) {
  const long double acx = (long double)a.x - c.x;
  const long double acy = (long double)a.y - c.y;
  const long double bcx = (long double)b.x - c.x;
  const long double bcy = (long double)b.y - c.y;
  return double(acx * bcy - acy * bcx);
}

// > 0 when d lies strictly inside the circumcircle of CCW triangle (a, b, c).
double incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const long double adx = (long double)a.x - d.x, ady = (long double)a.y - d.y;
  const long double bdx = (long double)b.x - d.x, bdy = (long double)b.y - d.y;
  const long double cdx = (long double)c.x - d.x, cdy = (long double)c.y - d.y;
  const long double ad = adx * adx + ady * ady;
  const long double bd = bdx * bdx + bdy * bdy;
  const long double cd = cdx * cdx + cdy * cdy;
  return double(adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) +
                ad * (bdx * cdy - bdy * cdx));
}

struct DTri {
  int v[3];
  int adj[3];  // adj[k] across the edge opposite v[k]
  bool alive = true;
};

class Delaunay2D {
 public:
  explicit Delaunay2D(const std::vector<Vec2>& pts) : pts_(pts) {
    double r = 1.0;
    for (const auto& p : pts) r = std::max(r, std::max(std::fabs(p.x), std::fabs(p.y)));
    const double big = 64.0 * r;
    const int m = static_cast<int>(pts.size());
    pts_.push_back({-4.0 * big, -3.0 * big});
    pts_.push_back({4.0 * big, -3.0 * big});
    pts_.push_back({0.0, 5.0 * big});
    tris_.push_back({{m, m + 1, m + 2}, {-1, -1, -1}, true});
    last_ = 0;
    for (int i = 0; i < m; ++i) insert(i);
  }

  std::vector<std::array<int, 3>> triangles() const {
    const int m = static_cast<int>(pts_.size()) - 3;
    std::vector<std::array<int, 3>> out;
    for (const auto& t : tris_) {
      if (!t.alive) continue;
      if (t.v[0] >= m || t.v[1] >= m || t.v[2] >= m) continue;
      out.push_back({t.v[0], t.v[1], t.v[2]});
    }
    return out;
  }

 private:
  int locate(int p) const {
    int cur = last_;
    if (cur < 0 || !tris_[cur].alive)
      for (int i = int(tris_.size()) - 1; i >= 0; --i)
        if (tris_[i].alive) { cur = i; break; }
    const Vec2 q = pts_[p];
    for (size_t step = 0; step < 4 * tris_.size() + 16; ++step) {
      const DTri& t = tris_[cur];
      int next = -1;
      for (int k = 0; k < 3; ++k) {
        const Vec2 a = pts_[t.v[(k + 1) % 3]];
        const Vec2 b = pts_[t.v[(k + 2) % 3]];
        if (orient(a, b, q) < 0.0) {
          next = t.adj[k];
          break;
        }
      }
      if (next < 0) return cur;
      cur = next;
    }
    // walk failed (should not happen with the jittered point sets); scan
    for (size_t i = 0; i < tris_.size(); ++i) {
      const DTri& t = tris_[i];
      if (!t.alive) continue;
      bool inside = true;
      for (int k = 0; k < 3 && inside; ++k)
        inside = orient(pts_[t.v[(k + 1) % 3]], pts_[t.v[(k + 2) % 3]], q) >= 0.0;
      if (inside) return int(i);
    }
    throw MeshFailure("point location failed");
  }

  void insert(int p) {
    const int seed = locate(p);
    // Grow the cavity of triangles whose circumcircle contains p.
    std::vector<int> cavity, stack{seed};
    tris_[seed].alive = false;
    cavity.push_back(seed);
    while (!stack.empty()) {
      const int ti = stack.back();
      stack.pop_back();
      for (int k = 0; k < 3; ++k) {
        const int nb = tris_[ti].adj[k];
        if (nb < 0 || !tris_[nb].alive) continue;
        const DTri& t = tris_[nb];
        if (incircle(pts_[t.v[0]], pts_[t.v[1]], pts_[t.v[2]], pts_[p]) > 0.0) {
          t_alive(nb) = false;
          cavity.push_back(nb);
          stack.push_back(nb);
        }
      }
    }
    // Boundary edges of the cavity, oriented so the cavity is on the left.
    struct BEdge {
      int a, b, outside;
    };
    std::vector<BEdge> edges;
    for (int ti : cavity) {
      const DTri& t = tris_[ti];
      for (int k = 0; k < 3; ++k) {
        const int nb = t.adj[k];
        if (nb >= 0 && !tris_[nb].alive) continue;  // internal cavity edge
        edges.push_back({t.v[(k + 1) % 3], t.v[(k + 2) % 3], nb});
      }
    }
    // Fan from p; link ring neighbours through a map keyed by first vertex.
    std::map<int, int> by_first;
    const int base = static_cast<int>(tris_.size());
    for (size_t e = 0; e < edges.size(); ++e) {
      DTri nt;
      nt.v[0] = p;
      nt.v[1] = edges[e].a;
      nt.v[2] = edges[e].b;
      nt.adj[0] = edges[e].outside;
      nt.adj[1] = -1;
      nt.adj[2] = -1;
      const int id = base + static_cast<int>(e);
      if (edges[e].outside >= 0) {
        DTri& out = tris_[edges[e].outside];
        for (int k = 0; k < 3; ++k) {
          const int a = out.v[(k + 1) % 3], b = out.v[(k + 2) % 3];
          if ((a == edges[e].b && b == edges[e].a)) out.adj[k] = id;
        }
      }
      tris_.push_back(nt);
      by_first[edges[e].a] = id;
    }
    for (size_t e = 0; e < edges.size(); ++e) {
      const int id = base + static_cast<int>(e);
      DTri& t = tris_[id];
      // edge (p, a) pairs with the fan triangle whose first vertex is b of
      // the neighbour; edge opposite v[2]=b is (p, a).
      auto it = by_first.find(edges[e].b);
      if (it != by_first.end()) t.adj[1] = it->second;  // across (v2, v0) = (b, p)
      // across (v0, v1) = (p, a): triangle whose edge (x, a) ends at a
    }
    // Second pass for the other ring link: neighbour whose b equals our a.
    std::map<int, int> by_second;
    for (size_t e = 0; e < edges.size(); ++e) by_second[edges[e].b] = base + int(e);
    for (size_t e = 0; e < edges.size(); ++e) {
      const int id = base + static_cast<int>(e);
      auto it = by_second.find(edges[e].a);
      if (it != by_second.end()) tris_[id].adj[2] = it->second;
    }
    last_ = base;
  }

  bool& t_alive(int i) { return tris_[i].alive; }

  std::vector<Vec2> pts_;
  std::vector<DTri> tris_;
  int last_ = -1;
};

double tri_min_angle(Vec2 a, Vec2 b, Vec2 c) {
  const double la = (b - c).norm(), lb = (c - a).norm(), lc = (a - b).norm();
  auto ang = [](double opp, double s1, double s2) {
    double x = (s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2);
    x = std::clamp(x, -1.0, 1.0);
    return std::acos(x);
  };
  return std::min({ang(la, lb, lc), ang(lb, lc, la), ang(lc, la, lb)});
}

}  // namespace

std::vector<std::array<int, 3>> delaunay(const std::vector<Vec2>& pts) {
  Delaunay2D d(pts);
  return d.triangles();
}

namespace {

Mesh generate_mesh_once(const ConvexBody& body, double s_eff,
                        const std::vector<double>& spacing) {
  const int N = body.N;
  std::vector<Vec2> pts(body.X.begin(), body.X.end());

  // Advancing offset layers between the boundary sampling and the interior
  // lattice. The local size sigma(theta) walks geometrically from the
  // boundary spacing toward the interior scale; each layer sits one local
  // size below the previous one and is resampled to that size, so lateral and
  // radial spacing stay matched. All quantities are smooth in theta, which
  // keeps transition zones free of slivers, and all rules are local, so
  // centrally symmetric bodies yield centrally symmetric point sets.
  const double kGrow = 1.45;
  double max_ratio = 1.0;
  for (int i = 0; i < N; ++i)
    max_ratio = std::max(max_ratio, std::exp(std::fabs(std::log(spacing[i] / s_eff))));
  int layers = 1 + static_cast<int>(std::ceil(std::log(max_ratio) / std::log(kGrow)));
  layers = std::min(layers + 1, 24);

  std::vector<double> D(N, 0.0);      // cumulative offset depth per angle node
  std::vector<double> sigma(N, 0.0);  // local size of the current layer
  std::vector<double> adv(N, 0.0);    // advance achieved in the current layer
  double core_scale = s_eff;

  for (int layer = 1; layer <= layers; ++layer) {
    bool any = false;
    for (int i = 0; i < N; ++i) {
      const double lnu = std::log(spacing[i] / s_eff);
      const double mag = std::max(0.0, std::fabs(lnu) - layer * std::log(kGrow));
      sigma[i] = s_eff * std::exp(lnu < 0 ? -mag : mag);
      const double cap = 0.7 * body.dS[i];  // local offset validity
      const double dn = std::min(D[i] + 0.85 * sigma[i], cap);
      adv[i] = dn - D[i];
      D[i] = dn;
      if (adv[i] > 0.25 * sigma[i]) any = true;
    }
    if (!any) break;

    std::vector<Vec2> P(N);
    for (int i = 0; i < N; ++i) {
      const double c = std::cos(body.theta[i]), si = std::sin(body.theta[i]);
      P[i] = body.X[i] - Vec2{c, si} * D[i];
    }
    // While the boundary sampling is commensurate with the size field, keep
    // the layer on the boundary angles, staggered half a cell on alternating
    // layers: the band triangulates into a unique running-bond pattern and
    // every boundary node sees the same local stencil. (Aligned layers form
    // cocircular trapezoids whose Delaunay diagonals flip arbitrarily, and
    // resampled layers beat against the boundary nodes; both pollute the
    // boundary flux.) Once the field calls for a genuinely different
    // resolution, resample the offset curve instead.
    bool commensurate = true;
    for (int i = 0; i < N; ++i) {
      if (spacing[i] > 1.5 * sigma[i] || spacing[i] < 0.5 * sigma[i]) {
        commensurate = false;
        break;
      }
    }
    if (layer == 1 || commensurate) {
      const bool staggered = layer % 2 == 1;
      for (int i = 0; i < N; ++i) {
        const int j = (i + 1) % N;
        if (staggered) {
          if (adv[i] <= 0.25 * sigma[i] || adv[j] <= 0.25 * sigma[j]) continue;
          const double tm = body.theta[i] + kPi / N;  // midpoint angle
          const double dm = 0.5 * (D[i] + D[j]);
          const double h = body.trig.eval(tm), dh = body.trig.deriv(tm);
          const double c = std::cos(tm), si = std::sin(tm);
          pts.push_back(Vec2{h * c - dh * si - dm * c, h * si + dh * c - dm * si});
        } else {
          if (adv[i] <= 0.25 * sigma[i]) continue;
          pts.push_back(P[i]);
        }
      }
    } else {
      // resample the offset polyline at the local size
    std::vector<double> t(N + 1, 0.0);
    for (int i = 0; i < N; ++i) {
      const double seg = (P[(i + 1) % N] - P[i]).norm();
      t[i + 1] = t[i] + seg / (0.5 * (sigma[i] + sigma[(i + 1) % N]));
    }
    long M = std::lround(t[N] / 2.0) * 2;  // even count keeps antipodal symmetry
    if (M < 6) {
      // too few nodes to resample; stop layering here
      double r_min2 = 1e300;
      for (int i = 0; i < N; ++i) r_min2 = std::min(r_min2, body.support.h[i] - D[i]);
      break;
    }
    int seg_i = 0;
    for (long j = 0; j < M; ++j) {
      const double tj = t[N] * j / M;
      while (seg_i + 1 < N && t[seg_i + 1] <= tj) ++seg_i;
      const double w = (tj - t[seg_i]) / (t[seg_i + 1] - t[seg_i]);
      // emit only where the layer actually advanced
      const double local_adv = (1.0 - w) * adv[seg_i] + w * adv[(seg_i + 1) % N];
      const double local_sig = (1.0 - w) * sigma[seg_i] + w * sigma[(seg_i + 1) % N];
      if (local_adv < 0.25 * local_sig) continue;
      pts.push_back(P[seg_i] + (P[(seg_i + 1) % N] - P[seg_i]) * w);
    }
    }

    // stop once the remaining core is a couple of local cells wide; the hex
    // lattice or the origin point closes it
    double r_min = 1e300, sig_max = 0.0;
    for (int i = 0; i < N; ++i) {
      r_min = std::min(r_min, body.support.h[i] - D[i]);
      sig_max = std::max(sig_max, sigma[i]);
    }
    core_scale = sig_max;
    if (r_min < 2.2 * sig_max) break;
  }

  // Local clearance for the interior lattice: stay below every tangent line
  // by the local layer depth plus half a cell.
  std::vector<double> clear_k(N);
  for (int k = 0; k < N; ++k) {
    double dmax = 0.0;
    for (int o = -2; o <= 2; ++o) dmax = std::max(dmax, D[(k + o + N) % N]);
    clear_k[k] = dmax + 0.55 * s_eff;
  }

  // Hexagonal interior lattice.
  const double s = s_eff;
  const double sy = s * std::sqrt(3.0) / 2.0;
  const double rmax = body.max_h;
  const long jmax = static_cast<long>(rmax / sy) + 2;
  const long imax = static_cast<long>(rmax / s) + 2;
  std::vector<double> cth(N), sth(N);
  for (int k = 0; k < N; ++k) {
    cth[k] = std::cos(body.theta[k]);
    sth[k] = std::sin(body.theta[k]);
  }
  size_t hex_added = 0;
  for (long j = -jmax; j <= jmax; ++j) {
    for (long i = -imax; i <= imax; ++i) {
      Vec2 p{s * (i + 0.5 * (j & 1L ? 1.0 : 0.0)), sy * j};
      const Vec2 jit = lattice_jitter(i, j);
      p.x += 1e-4 * s * jit.x;
      p.y += 1e-4 * s * jit.y;
      bool ok = true;
      for (int k = 0; k < N; ++k) {
        const double margin = body.support.h[k] - (p.x * cth[k] + p.y * sth[k]);
        if (margin < clear_k[k]) {
          ok = false;
          break;
        }
      }
      if (ok) {
        pts.push_back(p);
        ++hex_added;
      }
    }
  }
  if (hex_added == 0) {
    // coarse limit: close the core with the origin if there is room for it
    double gap = 1e300;
    for (const auto& q : pts) gap = std::min(gap, q.norm());
    if (gap > 0.35 * core_scale) pts.push_back({0.0, 0.0});
  }

  Mesh mesh;
  mesh.v = pts;
  mesh.n_boundary = N;
  mesh.boundary_loop.resize(N);
  for (int i = 0; i < N; ++i) mesh.boundary_loop[i] = i;
  mesh.tri = delaunay(pts);
  if (mesh.tri.empty()) throw MeshFailure("triangulation is empty");

  // enforce positive orientation
  for (auto& t : mesh.tri) {
    if (orient(pts[t[0]], pts[t[1]], pts[t[2]]) < 0.0) std::swap(t[1], t[2]);
  }

  // Consecutive boundary vertices must be joined by an edge and the
  // triangulation must be a disk (V - E + T = 1).
  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& t : mesh.tri)
    for (int k = 0; k < 3; ++k) {
      int a = t[k], b = t[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      edge_count[{a, b}]++;
    }
  for (int i = 0; i < N; ++i) {
    int a = i, b = (i + 1) % N;
    if (a > b) std::swap(a, b);
    if (!edge_count.count({a, b}))
      throw MeshFailure("boundary edge missing at node " + std::to_string(i));
  }
  const long V = static_cast<long>(pts.size());
  const long E = static_cast<long>(edge_count.size());
  const long T = static_cast<long>(mesh.tri.size());
  if (V - E + T != 1) throw MeshFailure("triangulation is not simply connected");

  double min_angle = std::numeric_limits<double>::infinity();
  double max_edge = 0.0;
  std::array<int, 3> worst{-1, -1, -1};
  for (const auto& t : mesh.tri) {
    const double a = tri_min_angle(pts[t[0]], pts[t[1]], pts[t[2]]);
    if (a < min_angle) {
      min_angle = a;
      worst = t;
    }
    for (int k = 0; k < 3; ++k)
      max_edge = std::max(max_edge, (pts[t[k]] - pts[t[(k + 1) % 3]]).norm());
  }
  mesh.quality.worst_tri = worst;
  mesh.quality.min_angle_deg = min_angle * 180.0 / kPi;
  mesh.quality.max_edge = max_edge;
  mesh.quality.boundary_nodes = N;
  mesh.quality.interior_nodes = static_cast<int>(pts.size()) - N;
  return mesh;
}

}  // namespace

Mesh generate_mesh(const ConvexBody& body, double target_size) {
  if (!(target_size > 0.0)) throw MeshFailure("target size must be positive");
  const int N = body.N;

  // Local boundary spacing at node i (mean of adjacent edges).
  std::vector<double> spacing(N);
  for (int i = 0; i < N; ++i)
    spacing[i] = 0.5 * (body.edge[(i + N - 1) % N] + body.edge[i]);

  // Interior sizing: the user target, capped so the interior never jumps more
  // than a grading factor past the boundary sampling (keeps the 20 deg bound
  // reachable on coarse targets; the mesh is then finer than requested).
  // interior cell must fit inside the body
  double s = std::min(target_size, 0.8 * body.min_h);

  Mesh mesh;
  for (int attempt = 0;; ++attempt) {
    mesh = generate_mesh_once(body, s, spacing);
    if (mesh.quality.min_angle_deg >= 20.0) break;
    if (attempt >= 3) {
      const auto& w = mesh.quality.worst_tri;
      std::string where;
      if (w[0] >= 0) {
        for (int vv : w)
          where += " v" + std::to_string(vv) + "=(" + std::to_string(mesh.v[vv].x) +
                   "," + std::to_string(mesh.v[vv].y) + ")";
      }
      throw MeshFailure("min angle " + std::to_string(mesh.quality.min_angle_deg) +
                        " deg below 20 after refinement" + where);
    }
    s *= 0.85;  // retry with a finer interior
  }
  return mesh;
}

}  // namespace minkflow
