#pragma once

#include <array>
#include <vector>

#include "minkflow/geometry.hpp"

namespace minkflow {

struct MeshQuality {
  double min_angle_deg = 0.0;
  double max_edge = 0.0;
  int boundary_nodes = 0;
  int interior_nodes = 0;
  std::array<int, 3> worst_tri{-1, -1, -1};
};

// Triangulation of the body polygon. The first n_boundary vertices are the
// body's embedded boundary points, in grid order and bit-for-bit.
struct Mesh {
  std::vector<Vec2> v;
  std::vector<std::array<int, 3>> tri;  // positively oriented
  std::vector<int> boundary_loop;       // 0 .. n_boundary-1
  int n_boundary = 0;
  MeshQuality quality;
};

Mesh generate_mesh(const ConvexBody& body, double target_size);

// Delaunay triangulation of a point set in convex position plus interior
// points; used by generate_mesh and exposed for tests.
std::vector<std::array<int, 3>> delaunay(const std::vector<Vec2>& pts);

}  // namespace minkflow
