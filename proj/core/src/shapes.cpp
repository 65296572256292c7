#include "kplateau/shapes.hpp"

#include <cmath>
#include <numbers>

#include "kplateau/direction_grid.hpp"

namespace kplateau {

std::vector<Point> circle_points(int count, double r, const Point& c) {
  require(count >= 3, "a polygon needs at least three vertices");
  std::vector<Point> p;
  p.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double a = 2 * std::numbers::pi * i / count;
    p.push_back(c + r * Point(std::cos(a), std::sin(a), 0.0));
  }
  return p;
}

ConvexBody disk(int count, double r, const Point& c) { return ConvexBody(2, circle_points(count, r, c)); }

ConvexBody ball(int subdivisions, double r, const Point& c) {
  auto ico = make_icosphere(subdivisions);
  for (auto& v : ico.vertices) v = c + r * v;
  return ConvexBody(3, ico.vertices);
}

ConvexBody box(int dim, const Vec3& lo, const Vec3& hi) {
  std::vector<Point> p;
  const int corners = dim == 2 ? 4 : 8;
  for (int i = 0; i < corners; ++i)
    p.emplace_back(i & 1 ? hi.x() : lo.x(), i & 2 ? hi.y() : lo.y(), dim == 3 ? (i & 4 ? hi.z() : lo.z()) : 0.0);
  return ConvexBody(dim, p);
}

}  // namespace kplateau
