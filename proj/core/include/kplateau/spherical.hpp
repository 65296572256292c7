#pragma once

#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "kplateau/convex_kernel.hpp"

namespace kplateau {

// Open half-space {x : <x, normal> < height}.
struct HalfSpace {
  Vec3 normal = Vec3::UnitZ();
  double height = std::numeric_limits<double>::infinity();

  HalfSpace() = default;
  HalfSpace(const Vec3& n, double t);
  bool contains(const Point& x) const { return x.dot(normal) < height; }
};

struct SphericalSet {
  DirectionSet set;
  bool strictly_in_hemisphere = false;
  std::optional<Vec3> witness;  // <witness, u> < 0 for every member

  SphericalSet() = default;
  explicit SphericalSet(DirectionSet s);  // computes the hemisphere flags
  const std::vector<Vec3>& directions() const { return set.directions; }
  std::size_t size() const { return set.size(); }
  bool empty() const { return set.empty(); }
};

// Recomputes witness/strictness from the members (margin 1e-9).
void update_hemisphere(SphericalSet& s);

// P(x', t) = -x'/t on the open southern hemisphere; planar directions map to
// R^1 (result in the x coordinate).
Point affine_projection(const Vec3& u, int dim);
// Inverse of affine_projection: Q(y) = (y, -1) / sqrt(1 + |y|^2).
Vec3 affine_lift(const Point& y, int dim);

struct DualOptions {
  double angular_res = std::numbers::pi / 180.0;
  // Members M satisfy <N, M> < -margin for every N in X. NaN selects
  // sin(angular_res); a negative value gives the closed dual.
  double margin = std::numeric_limits<double>::quiet_NaN();
  // Thin duals are completed from their exact polar generators.
  bool fill_boundary = true;
};

SphericalSet dual_set(const SphericalSet& x, const DualOptions& opt = {});

// Spherical hull via the affine projection. Throws when X is not strictly
// inside a hemisphere.
SphericalSet spherical_convex_hull(const SphericalSet& x, double angular_res = std::numbers::pi / 180.0);

struct LinkOptions {
  std::vector<double> radii;  // default diam * 2^-j, j = 3..8
  double angular_res = std::numbers::pi / 180.0;
  double boundary_tol = -1.0;
};

// Union over r of the sampled {N : x + r N interior to K}.
SphericalSet link(const ConvexBody& k, const Point& x, const LinkOptions& opt = {});

struct IntersectionOptions {
  double angular_res = std::numbers::pi / 180.0;
  double h = 1e-6;  // interior / boundary tolerance
};

SphericalSet normals_of_intersection(const ConvexBody& k1, const ConvexBody& k2, const Point& x,
                                     const IntersectionOptions& opt = {});

// Spherical set equality up to angular resolution: angular Hausdorff distance.
double spherical_set_distance(const SphericalSet& a, const SphericalSet& b);

}  // namespace kplateau
