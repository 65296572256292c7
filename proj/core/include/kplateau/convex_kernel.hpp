#pragma once

#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kplateau/convex_body.hpp"
#include "kplateau/types.hpp"

namespace kplateau {

enum class DirectionKind { supporting_normals, link, dual, generic };

std::string to_string(DirectionKind k);

// Finite subset of the unit sphere. add() normalizes and skips entries within
// 1e-9 rad of an existing one.
struct DirectionSet {
  int dim = 3;
  std::vector<Vec3> directions;
  DirectionKind kind = DirectionKind::generic;

  DirectionSet() = default;
  DirectionSet(int d, DirectionKind k) : dim(d), kind(k) {}

  bool add(const Vec3& u);
  bool empty() const { return directions.empty(); }
  std::size_t size() const { return directions.size(); }
};

// Angular Hausdorff distance between two direction samples (max convention,
// radians). Empty against nonempty is +inf, empty against empty is 0.
double angular_hausdorff(const DirectionSet& a, const DirectionSet& b);

enum class HausdorffConvention { sum, max };

// Hausdorff distance. Between bodies the directed terms are exact (distance to
// a convex body is convex, so its supremum sits at a vertex); point sets are
// used as given.
double hausdorff_distance(const ConvexBody& a, const ConvexBody& b,
                          HausdorffConvention c = HausdorffConvention::sum);
double hausdorff_distance(std::span<const Point> a, std::span<const Point> b,
                          HausdorffConvention c = HausdorffConvention::sum);
double hausdorff_distance(const ConvexBody& a, std::span<const Point> b,
                          HausdorffConvention c = HausdorffConvention::sum);
double hausdorff_distance(std::span<const Point> a, const ConvexBody& b,
                          HausdorffConvention c = HausdorffConvention::sum);

// sup over a of dist(a, b), brute force with early exit.
double directed_hausdorff(std::span<const Point> a, std::span<const Point> b);

Projection distance_and_project(const ConvexBody& k, const Point& x);

struct NormalOptions {
  double angular_res = std::numbers::pi / 180.0;
  double tol = -1.0;           // support slack; < 0 means 1e-12 * scale
  double boundary_tol = -1.0;  // dist to boundary accepted as "on"; < 0 means 1e-7 * scale
};

// Sampled normal cone at a boundary point. Points slightly off the boundary
// (within boundary_tol) are snapped to it first.
DirectionSet supporting_normals(const ConvexBody& k, const Point& x, const NormalOptions& opt = {});

ConvexBody convex_hull(int dim, std::span<const Point> pts);

struct GraphChart {
  int dim = 3;           // ambient dimension, n + 1
  Point base_point;      // x on the boundary
  Eigen::Matrix3d frame; // columns e_1..e_n, then the inward axis; planar: (e_1, axis, e_3)
  double theta = 0.0;
  double r = 0.0;
  double radius = 0.0;   // rho
  double lipschitz = 0.0;
  // values on a square (planar: segment) grid of `samples` nodes per axis
  // spanning [-rho, rho]; NaN outside the disk.
  int samples = 0;
  std::vector<double> values;

  Vec3 axis() const { return frame.col(dim - 1); }
  double spacing() const { return samples > 1 ? 2 * radius / (samples - 1) : 0.0; }
  // Chart coordinate of node (i, j) (j ignored when planar).
  Eigen::Vector2d coord(int i, int j = 0) const;
  double value(int i, int j = 0) const { return values[dim == 3 ? i * samples + j : i]; }
  Point to_world(const Eigen::Vector2d& xp, double t) const;
};

struct ChartOptions {
  std::optional<double> r;  // fixed radius, otherwise auto-shrunk
  int samples = 41;
  double boundary_tol = -1.0;
};

// Lower-envelope chart over the tangent plane of the central supporting
// normal at x.
GraphChart extract_graph_chart(const ConvexBody& k, const Point& x, double theta, const ChartOptions& opt = {});

// Evaluates the lower envelope of K along -axis lines: f(x') = min{t : x + x'
// + t axis in K}. NaN where the line misses K.
double envelope_height(const ConvexBody& k, const Point& base, const Eigen::Matrix3d& frame, int dim,
                       const Eigen::Vector2d& xp);

struct LgpOptions {
  std::vector<double> radii;  // default diam * 2^-j, j = 3..8
  double angular_res = std::numbers::pi / 180.0;
  double margin = 1e-8;
  double boundary_tol = -1.0;
  // Add sphere-grid directions u with x + r u in K to the exact tangent-cone
  // generators. Never changes the answer on polytopes; costs one distance
  // query per grid direction and radius.
  bool sample_directions = true;
};

bool has_local_geodesic_property(const ConvexBody& k, const Point& x, const LgpOptions& opt = {});

}  // namespace kplateau
