#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "kplateau/convex_kernel.hpp"
#include "kplateau/ma_solver.hpp"

namespace kplateau {

// Frozen boundary subset X. Either the part of the initial boundary inside a
// half-space {<x, normal> <= offset}, or an explicit point sample.
struct FrozenSet {
  enum class Kind { halfspace, samples };
  Kind kind = Kind::halfspace;
  Vec3 normal = Vec3::UnitZ();
  double offset = 0.0;
  std::vector<Point> samples;  // boundary points of X (for half-spaces: taken from the initial body)

  static FrozenSet halfspace(const ConvexBody& k, const Vec3& normal, double offset);
  // Closed lower half of the boundary ({y <= 0} in the plane, {z <= 0} in space).
  static FrozenSet lower_half(const ConvexBody& k);
  static FrozenSet from_samples(std::vector<Point> pts);

  // Distance from p to X. For half-spaces this is the distance to the
  // half-space, which equals the distance to X for points of the boundary
  // near X.
  double distance(const Point& p) const;
  bool contains(const Point& p, double tol) const { return distance(p) <= tol; }
  // Extreme points of X on the current body (vertices of K n H for half-spaces).
  std::vector<Point> points_on(const ConvexBody& body) const;
  // min <x - base, axis> over X, evaluated on the current body.
  double min_height(const ConvexBody& body, const Point& base, const Vec3& axis) const;
};

struct Excision {
  Point base = Point::Zero();
  Vec3 axis = Vec3::Zero();
  double delta = 0.0;
  int omega_vertices = 0;
  double omega_inradius = 0.0;
  double omega_radius = 0.0;   // circumradius about the centroid
  double h = 0.0;              // Dirichlet grid spacing
  bool circumscribed = false;  // solved on the disk around Omega instead of Omega
  int unknowns = 0;
  int newton_iterations = 0;
  double residual = 0.0;
  double max_clamp = 0.0;      // largest projection of a patch point back into the body
  double volume_before = 0.0;
  double volume_after = 0.0;
  double hausdorff = 0.0;      // between the bodies before and after
  bool changed = true;         // false when the displacement is within the membership tolerance
};

enum class PointClass { frozen, smooth_constant_k, needs_excision, lgp_singular };
std::string to_string(PointClass c);

struct IterationLog {
  int iteration = 0;
  double volume = 0.0;
  double hausdorff_increment = 0.0;
  std::map<PointClass, int> counts;
  double min_free_curvature = 0.0;
  double max_free_curvature = 0.0;
  int attempts = 0;            // excision sites tried
};

struct BarrierState {
  ConvexBody body;
  FrozenSet X;
  double k = 0.25;
  double h = 1.0 / 512;        // membership tolerance for X; the collar is 2h
  std::vector<Excision> history;
  std::vector<double> hausdorff_increments;
  std::vector<double> volumes;  // initial volume, then one entry per changing excision
  std::vector<IterationLog> log;
  // converged_smooth, converged_hausdorff, stopped_at_collar, no_admissible_site or max_iters
  std::string status;

  BarrierState() = default;
  BarrierState(ConvexBody b, FrozenSet x, double k_, double h_);

  int dim() const { return body.dim(); }
  double collar() const { return 2 * h; }
};

struct ExcisionOptions {
  double ma_h = 1.0 / 64;      // upper bound; shrunk to inradius / 8 on small domains
  double containment_tol = -1; // < 0: the membership tolerance h
  double hull_tol = -1;        // < 0: the membership tolerance h
  std::optional<double> k;     // curvature override (used by the LGP remedy)
  SolveOptions solver;
};

// Chart frame at a boundary point: axis = inward averaged facet normal.
GraphChart excision_chart(const ConvexBody& body, const Point& x);

// Largest delta keeping the excised slab outside the collar of X.
double max_excision_depth(const BarrierState& state, const GraphChart& chart);

BarrierState excise(const BarrierState& state, const GraphChart& chart, double delta, const ExcisionOptions& opts = {});

struct ClassifyOptions {
  double tol_kappa = 0.05;
  bool lgp_remedy = true;
  ExcisionOptions excision;
};

struct PointReport {
  PointClass tag = PointClass::needs_excision;
  double curvature = 0.0;      // NaN when no local chart fit exists
  double excess = 0.0;         // curvature - target
  bool lgp = false;
  bool remedy_applied = false;
};

// Gauss curvature of the boundary at a vertex from a local quadratic fit over
// its two-ring; NaN when too few neighbours.
double vertex_curvature(const ConvexBody& body, int vertex);

PointReport classify_point(const BarrierState& state, const Point& x, const ClassifyOptions& opts = {});
PointClass classify_boundary_point(const BarrierState& state, const Point& x, const ClassifyOptions& opts = {});

struct PlateauOptions {
  double tol_H = 1e-3;
  double tol_kappa = 0.05;
  int max_iters = 20;
  int max_attempts = 6;        // sites tried per iteration before giving up
  double min_delta = 1e-3;
  double h = 1.0 / 512;
  double ma_h = 1.0 / 64;
  int threads = 1;
  bool lgp_remedy = true;
};

BarrierState solve_plateau(const ConvexBody& k, const FrozenSet& X, double curvature, const PlateauOptions& opts = {});

// Free boundary samples: vertices of the body outside X.
std::vector<Point> free_surface(const BarrierState& state);

// Per-class counts over the vertices of the body.
std::map<PointClass, int> classification_histogram(const BarrierState& state, const ClassifyOptions& opts = {},
                                                   int threads = 1);

}  // namespace kplateau
