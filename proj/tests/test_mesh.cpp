#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "minkflow/errors.hpp"
#include "minkflow/mesh.hpp"

using namespace minkflow;

namespace {

bool delaunay_property(const std::vector<Vec2>& pts,
                       const std::vector<std::array<int, 3>>& tris) {
  // spot check: no vertex strictly inside any circumcircle (O(T * V), small inputs)
  for (const auto& t : tris) {
    const Vec2 a = pts[t[0]], b = pts[t[1]], c = pts[t[2]];
    const double d2 = 2.0 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
    const double bx = b.x - a.x, by = b.y - a.y, cx = c.x - a.x, cy = c.y - a.y;
    const double b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
    const Vec2 cc{a.x + (cy * b2 - by * c2) / d2, a.y + (bx * c2 - cx * b2) / d2};
    const double r2 = (a - cc).dot(a - cc);
    for (size_t j = 0; j < pts.size(); ++j) {
      if (static_cast<int>(j) == t[0] || static_cast<int>(j) == t[1] ||
          static_cast<int>(j) == t[2])
        continue;
      if ((pts[j] - cc).dot(pts[j] - cc) < r2 * (1.0 - 1e-9)) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("delaunay of a small point set") {
  std::vector<Vec2> pts{{0, 0}, {1, 0.02}, {2.1, 0}, {0.05, 1}, {1.1, 1.04},
                        {1.9, 1.1}, {0.4, 2}, {1.5, 2.2}, {0.9, 0.55}};
  auto tris = delaunay(pts);
  CHECK(!tris.empty());
  CHECK(delaunay_property(pts, tris));
  // all points used
  std::set<int> used;
  for (auto& t : tris) used.insert(t.begin(), t.end());
  CHECK(used.size() == pts.size());
}

TEST_CASE("mesh of the unit disk") {
  ConvexBody disk = build_body(support_disk(1.0, 128));
  Mesh m = generate_mesh(disk, 0.1);
  CHECK(m.n_boundary == 128);
  // boundary nodes preserved bit-for-bit
  for (int i = 0; i < 128; ++i) {
    CHECK(m.v[i].x == disk.X[i].x);
    CHECK(m.v[i].y == disk.X[i].y);
  }
  CHECK(m.quality.min_angle_deg >= 20.0);
  CHECK(m.quality.interior_nodes > 100);
  // triangle count consistent with area pi / (element area)
  CHECK(m.tri.size() > 300);

  // positively oriented triangles
  for (const auto& t : m.tri) {
    const Vec2 a = m.v[t[0]], b = m.v[t[1]], c = m.v[t[2]];
    CHECK((b - a).cross(c - a) > 0.0);
  }

  // covered area equals the polygon area
  double tri_area = 0.0;
  for (const auto& t : m.tri)
    tri_area += 0.5 * (m.v[t[1]] - m.v[t[0]]).cross(m.v[t[2]] - m.v[t[0]]);
  double poly_area = 0.0;
  for (int i = 0; i < 128; ++i) poly_area += 0.5 * disk.X[i].cross(disk.X[(i + 1) % 128]);
  CHECK(tri_area == doctest::Approx(poly_area).epsilon(1e-12));
}

TEST_CASE("mesh of the 2x1 ellipse at the acceptance resolution") {
  ConvexBody ell = build_body(support_ellipse(2.0, 1.0, 256));
  Mesh m = generate_mesh(ell, 0.04);
  CHECK(m.quality.min_angle_deg >= 20.0);
  CHECK(m.n_boundary == 256);
  for (int i = 0; i < 256; ++i) CHECK(m.v[i].x == ell.X[i].x);
}

TEST_CASE("coarse target still yields a quality mesh") {
  ConvexBody disk = build_body(support_disk(1.0, 64));
  Mesh m = generate_mesh(disk, 10.0);
  CHECK(m.quality.min_angle_deg >= 20.0);
  for (int i = 0; i < 64; ++i) CHECK(m.v[i].x == disk.X[i].x);
}

TEST_CASE("mesh determinism") {
  ConvexBody ell = build_body(support_ellipse(1.3, 1.0, 128));
  Mesh a = generate_mesh(ell, 0.08);
  Mesh b = generate_mesh(ell, 0.08);
  REQUIRE(a.v.size() == b.v.size());
  REQUIRE(a.tri.size() == b.tri.size());
  for (size_t i = 0; i < a.v.size(); ++i) {
    CHECK(a.v[i].x == b.v[i].x);
    CHECK(a.v[i].y == b.v[i].y);
  }
  for (size_t i = 0; i < a.tri.size(); ++i) CHECK(a.tri[i] == b.tri[i]);
}
