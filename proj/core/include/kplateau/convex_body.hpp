#pragma once

#include <memory>
#include <span>
#include <vector>

#include "kplateau/grid.hpp"
#include "kplateau/hull.hpp"
#include "kplateau/types.hpp"

namespace kplateau {

struct Projection {
  double distance = 0.0;
  Point point = Point::Zero();
};

struct BoundaryHit {
  double distance = 0.0;
  Point point = Point::Zero();
  int facet = -1;
};

// Compact convex set stored as the hull of finitely many points. Vertices are
// the extreme points of the input; everything else (facets, support samples,
// distance grids) is derived and cached. Copies share the immutable state.
class ConvexBody {
 public:
  ConvexBody() = default;
  ConvexBody(int dim, std::span<const Point> points, double rel_eps = 1e-12);
  ConvexBody(int dim, std::initializer_list<Point> points) : ConvexBody(dim, std::vector<Point>(points)) {}

  bool valid() const { return static_cast<bool>(impl_); }
  int dim() const;
  int affine_dim() const;
  bool full_dimensional() const { return affine_dim() == dim(); }
  bool degenerate() const { return !full_dimensional(); }

  const std::vector<Point>& vertices() const;
  // Facet vertex indices refer to vertices().
  const std::vector<Facet>& facets() const;
  // Vertex adjacency along hull edges.
  const std::vector<std::vector<int>>& neighbours() const;

  double support(const Vec3& u) const;
  int support_vertex(const Vec3& u, int hint = 0) const;
  // h_K on sphere_directions(dim, angular_res), same order.
  const std::vector<double>& support_samples(double angular_res) const;

  Projection project(const Point& x) const;
  BoundaryHit closest_boundary_point(const Point& x) const;
  double distance(const Point& x) const { return project(x).distance; }
  // Negative inside (distance to the boundary), positive outside.
  double signed_distance(const Point& x) const;
  bool contains(const Point& x, double tol = 0.0) const { return signed_distance(x) <= tol; }
  // Facets whose closed triangle (segment) is within `radius` of x.
  std::vector<int> facets_near(const Point& x, double radius) const;

  double diameter() const;
  double volume() const;
  Point centroid() const;
  Vec3 lower() const;
  Vec3 upper() const;
  // Length scale used for relative tolerances.
  double scale() const;

  // Signed distance sampled on a bounding-box grid of spacing h (cached).
  const GridField& sdf(double h, double margin) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  const Impl& self() const;
};

}  // namespace kplateau
