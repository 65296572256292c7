#pragma once

#include <array>
#include <cmath>
#include <set>
#include <random>
#include <vector>

#include "kplateau/convex_kernel.hpp"
#include "kplateau/spherical.hpp"

namespace kplateau::testing {

inline std::vector<Point> random_cloud(std::mt19937_64& rng, int dim, int n, double spread = 1.0) {
  std::normal_distribution<double> g(0.0, spread);
  std::vector<Point> p;
  for (int i = 0; i < n; ++i) p.emplace_back(g(rng), g(rng), dim == 3 ? g(rng) : 0.0);
  return p;
}

inline Vec3 random_direction(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec3 u(g(rng), g(rng), dim == 3 ? g(rng) : 0.0);
  return u.normalized();
}

// n directions within angle `spread` of `center`.
inline DirectionSet cap_cloud(std::mt19937_64& rng, int dim, const Vec3& center, double spread, int n) {
  std::uniform_real_distribution<double> t(0.0, 1.0);
  DirectionSet s(dim, DirectionKind::generic);
  while (static_cast<int>(s.size()) < n) {
    const Vec3 u = random_direction(rng, dim);
    const Vec3 tangent = (u - u.dot(center) * center);
    if (tangent.norm() < 1e-9) continue;
    const double a = spread * (dim == 2 ? t(rng) : std::sqrt(t(rng)));
    s.add(std::cos(a) * center + std::sin(a) * tangent.normalized());
  }
  return s;
}

// Members of a that coincide with a member of b (shared grid points).
inline DirectionSet intersect(const DirectionSet& a, const DirectionSet& b) {
  auto key = [](const Vec3& u) {
    return std::array<long long, 3>{std::llround(u.x() * 1e9), std::llround(u.y() * 1e9), std::llround(u.z() * 1e9)};
  };
  std::set<std::array<long long, 3>> in_b;
  for (const auto& v : b.directions) in_b.insert(key(v));
  DirectionSet out(a.dim, a.kind);
  for (const auto& u : a.directions)
    if (in_b.count(key(u))) out.directions.push_back(u);
  return out;
}

inline DirectionSet unite(const DirectionSet& a, const DirectionSet& b) {
  DirectionSet out = a;
  for (const auto& v : b.directions) out.add(v);
  return out;
}

// Convex polygon from random points, guaranteed to have interior.
inline ConvexBody random_polygon(std::mt19937_64& rng, int n = 12) {
  for (;;) {
    ConvexBody k(2, random_cloud(rng, 2, n));
    if (k.full_dimensional() && k.vertices().size() >= 3) return k;
  }
}

}  // namespace kplateau::testing
