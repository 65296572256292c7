#include <cmath>
#include <numbers>

#include "kplateau_app/app.hpp"

namespace kplateau::app {

double equator_cap_hausdorff(const BarrierState& state, double R, int samples) {
  const int dim = state.dim();
  require(R >= 1.0, "cap radius below the equator radius");
  require(samples >= 1, "need at least one sample");
  const double drop = std::sqrt(R * R - 1.0);
  const Point c = dim == 3 ? Point(0, 0, -drop) : Point(0, -drop, 0);
  const int up = dim == 3 ? 2 : 1;

  // Free surface to cap: radial distance to the sphere where the radial foot
  // lies above the equator plane, else distance to the rim.
  double a = 0;
  for (const auto& p : free_surface(state)) {
    const Vec3 q = p - c;
    const Point foot = c + R * q.normalized();
    double d;
    if (foot[up] >= 0) {
      d = std::abs(q.norm() - R);
    } else {
      Vec3 rim = p;
      rim[up] = 0;
      rim = rim.norm() > 0 ? Vec3(rim.normalized()) : Vec3(Vec3::UnitX());
      d = (p - rim).norm();
    }
    a = std::max(a, d);
  }
  // Cap to the body boundary.
  double b = 0;
  for (int i = 0; i <= samples; ++i) {
    if (dim == 2) {
      const double x = -1 + 2.0 * i / samples;
      b = std::max(b, std::abs(state.body.signed_distance(Point(x, std::sqrt(R * R - x * x) - drop, 0))));
      continue;
    }
    const double rho = double(i) / samples;
    const int ring = std::max(1, static_cast<int>(std::lround(4 * samples * rho)));
    for (int j = 0; j < ring; ++j) {
      const double th = 2 * std::numbers::pi * j / ring;
      const Point q(rho * std::cos(th), rho * std::sin(th), std::sqrt(R * R - rho * rho) - drop);
      b = std::max(b, std::abs(state.body.signed_distance(q)));
    }
  }
  return a + b;
}

}  // namespace kplateau::app
