#pragma once

#include <functional>
#include <memory>
#include <string>

#include "kplateau/convex_body.hpp"

namespace kplateau {

using Vec2 = Eigen::Vector2d;

// Bounded convex domain in R^n, n in {1, 2}. Planar points use Vec2; for n = 1
// only the x coordinate is meaningful.
class GraphDomain {
 public:
  GraphDomain() = default;

  static GraphDomain interval(double a, double b);
  static GraphDomain disk(const Vec2& center, double radius);
  // Planar convex body (the z = 0 plane) with nonempty interior.
  static GraphDomain polygon(const ConvexBody& body);
  // {level < 0} for a convex level function, contained in [lo, hi].
  static GraphDomain implicit(int n, std::function<double(const Vec2&)> level, const Vec2& lo, const Vec2& hi);

  int n() const { return n_; }
  const Vec2& lower() const { return lo_; }
  const Vec2& upper() const { return hi_; }
  const std::string& description() const { return description_; }
  // Disks and intervals: centre and radius.
  bool round() const { return kind_ == Kind::interval || kind_ == Kind::disk; }
  Vec2 center() const { return kind_ == Kind::interval ? Vec2(0.5 * (lo_.x() + hi_.x()), 0.0) : center_; }
  double radius() const { return kind_ == Kind::interval ? 0.5 * (hi_.x() - lo_.x()) : radius_; }

  // Negative inside, zero on the boundary, positive outside.
  double level(const Vec2& x) const;
  bool inside(const Vec2& x) const { return level(x) < 0; }
  // Distance from the interior point x along the unit direction d to the
  // boundary; +inf when it exceeds `limit`.
  double ray_hit(const Vec2& x, const Vec2& d, double limit) const;

 private:
  enum class Kind { interval, disk, polygon, implicit };
  Kind kind_ = Kind::interval;
  int n_ = 1;
  Vec2 lo_ = Vec2::Zero(), hi_ = Vec2::Zero();
  Vec2 center_ = Vec2::Zero();
  double radius_ = 0.0;
  std::vector<Vec2> normals_;
  std::vector<double> offsets_;
  std::function<double(const Vec2&)> level_;
  std::string description_;
};

}  // namespace kplateau
