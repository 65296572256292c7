#pragma once

#include <vector>

#include "kplateau/convex_body.hpp"

namespace kplateau {

// Regular polygon on the circle of radius r about c, first vertex at angle 0.
std::vector<Point> circle_points(int count, double r = 1.0, const Point& c = Point::Zero());
ConvexBody disk(int count, double r = 1.0, const Point& c = Point::Zero());

// Icosphere of radius r (poles are vertices).
ConvexBody ball(int subdivisions, double r = 1.0, const Point& c = Point::Zero());

ConvexBody box(int dim, const Vec3& lo, const Vec3& hi);

}  // namespace kplateau
