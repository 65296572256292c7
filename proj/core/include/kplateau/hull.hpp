#pragma once

#include <array>
#include <span>
#include <vector>

#include "kplateau/types.hpp"

namespace kplateau {

// A supporting facet <normal, x> = offset with outward unit normal. In the
// plane a facet is an edge and v[2] == -1.
struct Facet {
  std::array<int, 3> v{-1, -1, -1};
  Vec3 normal = Vec3::Zero();
  double offset = 0.0;
};

struct HullResult {
  int affine_dim = -1;         // 0 point, 1 segment, 2 polygon, 3 polytope
  std::vector<int> vertices;   // indices into the input, extreme points only
  std::vector<Facet> facets;   // empty when affine_dim < dim - 0 for segments / points
};

// Andrew's monotone chain; counter-clockwise, collinear points dropped.
HullResult convex_hull_2d(std::span<const Point> pts, double eps);

// Quickhull in R^3. Coplanar input yields a two-sided fan of triangles.
HullResult convex_hull_3d(std::span<const Point> pts, double eps);

}  // namespace kplateau
