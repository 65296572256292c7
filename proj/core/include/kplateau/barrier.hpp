#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "kplateau/convex_body.hpp"
#include "kplateau/grid.hpp"

namespace kplateau {

// Radial bump chi(y) = C exp(-1 / (1 - |y|^2)) on the unit ball of R^dim,
// scaled as chi_s(y) = s^-dim chi(y / s).
class Mollifier {
 public:
  Mollifier(int dim, double scale);

  int dim() const { return dim_; }
  double scale() const { return scale_; }
  static double profile(double r);
  double operator()(const Vec3& y) const;

 private:
  int dim_;
  double scale_;
  double norm_;
};

// Discrete convolution with normalized weights. NaN samples are skipped, so
// partial kernels near the grid edge or a NaN region are renormalized.
GridField mollify(const GridField& field, const Mollifier& m);

struct LevelSetCurvature {
  Point point = Point::Zero();   // projected onto the level set
  Vec3 normal = Vec3::Zero();    // Df / |Df|
  std::vector<double> shape;     // eigenvalues of the shape operator
  double gauss = 0.0;            // their product
};

using SpaceField = std::function<double(const Point&)>;

// Curvature of {field = level} near x, by central differences of step h.
LevelSetCurvature level_set_curvature(const SpaceField& field, int dim, double level, const Point& x, double h);
// Grid version; differences use the grid spacing on the multilinear interpolant.
LevelSetCurvature level_set_curvature(const GridField& field, double level, const Point& x);

// Gauss curvature of a round sphere of radius 1/sqrt(k) in R^dim: sqrt(k) for
// curves, k for surfaces.
double target_gauss_curvature(int dim, double k);

// {A : |A| <= B, A >= 0, det(A restricted to N-perp) >= k^n}, n = dim - 1.
struct CurvatureMatrixSet {
  int dim = 3;
  double k = 1.0;
  double B = 1.0;
  Vec3 N = Vec3::UnitZ();

  bool contains(const Eigen::Matrix3d& a, double tol = 1e-12) const;
};

// Exact intersection of two bodies of the same dimension. Throws when empty.
ConvexBody intersect(const ConvexBody& a, const ConvexBody& b);

struct SmoothingOptions {
  int iteration = 1;              // m in r <= 2 / (3m)
  std::optional<double> r;        // overrides the level
  std::optional<double> s;        // overrides the mollifier scale (default r / 8)
  std::optional<double> h;        // overrides the grid spacing (default s / 2)
  std::optional<double> angular_res;  // level-set sampling; 0.25 deg planar, 2 deg spatial
  std::size_t max_nodes = 20'000'000;
};

struct SmoothedBody {
  ConvexBody body;
  double r = 0.0, s = 0.0, h = 0.0;
  double window = 0.0;            // rho
  double min_curvature = 0.0;     // over the sampled level set
  std::vector<Point> samples;     // level-set points
};

// Sublevel {d_s <= r} of the mollified distance to K1 n K2.
SmoothedBody smooth_intersection(const ConvexBody& k1, const ConvexBody& k2, double k, double eps,
                                 const SmoothingOptions& opts = {});

double volume(const ConvexBody& k);

}  // namespace kplateau
