#include "doctest.h"

#include <random>

#include "kplateau/direction_grid.hpp"
#include "kplateau/hull.hpp"
#include "kplateau/min_norm_point.hpp"

using namespace kplateau;

TEST_CASE("2d hull drops interior and collinear points") {
  std::vector<Point> p{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0.5, 0.5, 0}, {0.5, 0, 0}};
  auto h = convex_hull_2d(p, 1e-12);
  CHECK(h.affine_dim == 2);
  CHECK(h.vertices.size() == 4);
  CHECK(h.facets.size() == 4);
  for (const auto& f : h.facets)
    for (const auto& q : p) CHECK(f.normal.dot(q) - f.offset <= 1e-12);
}

TEST_CASE("2d hull of collinear points is a segment") {
  std::vector<Point> p{{0, 0, 0}, {2, 2, 0}, {1, 1, 0}};
  auto h = convex_hull_2d(p, 1e-12);
  CHECK(h.affine_dim == 1);
  CHECK(h.vertices.size() == 2);
}

TEST_CASE("3d hull of a cube with interior points") {
  std::vector<Point> p;
  for (int i = 0; i < 8; ++i) p.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int i = 0; i < 200; ++i) p.emplace_back(u(rng), u(rng), u(rng));
  auto h = convex_hull_3d(p, 1e-12);
  CHECK(h.affine_dim == 3);
  CHECK(h.vertices.size() == 8);
  CHECK(h.facets.size() == 12);
  for (const auto& f : h.facets)
    for (const auto& q : p) CHECK(f.normal.dot(q) - f.offset <= 1e-12);
}

TEST_CASE("3d hull of sphere samples keeps every point") {
  auto ico = make_icosphere(3);
  auto h = convex_hull_3d(ico.vertices, 1e-12);
  CHECK(h.vertices.size() == ico.vertices.size());
  CHECK(h.facets.size() == ico.faces.size());
}

TEST_CASE("3d hull of random points is closed and supporting") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0, 1);
  std::vector<Point> p;
  for (int i = 0; i < 2000; ++i) p.emplace_back(n(rng), n(rng), n(rng));
  auto h = convex_hull_3d(p, 1e-12);
  // Euler: V - E + F = 2 with E = 3F/2
  CHECK(int(h.vertices.size()) - int(h.facets.size()) / 2 == 2);
  for (const auto& f : h.facets)
    for (const auto& q : p) REQUIRE(f.normal.dot(q) - f.offset <= 1e-10);
}

TEST_CASE("coplanar 3d input gives a flat two-sided hull") {
  std::vector<Point> p{{0, 0, 1}, {1, 0, 1}, {0, 1, 1}, {1, 1, 1}, {0.3, 0.3, 1}};
  auto h = convex_hull_3d(p, 1e-12);
  CHECK(h.affine_dim == 2);
  CHECK(h.vertices.size() == 4);
}

TEST_CASE("min-norm point") {
  std::vector<Vec3> a{{1, 0, 0}, {0, 1, 0}};
  auto r = min_norm_point(a);
  CHECK(r.point.x() == doctest::Approx(0.5));
  CHECK(r.point.y() == doctest::Approx(0.5));
  std::vector<Vec3> b{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}};
  CHECK(min_norm_point(b).point.norm() < 1e-12);
  std::vector<Vec3> c{{1, 1, 1}, {2, 1, 1}, {1, 3, 2}};
  CHECK(min_norm_point(c).point.isApprox(Vec3(1, 1, 1)));
}
