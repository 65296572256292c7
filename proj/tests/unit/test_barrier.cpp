#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "kplateau/barrier.hpp"
#include "kplateau/convex_kernel.hpp"
#include "kplateau/shapes.hpp"

using namespace kplateau;

namespace {

double lens_area(double r, double d) { return 2 * r * r * std::acos(d / (2 * r)) - 0.5 * d * std::sqrt(4 * r * r - d * d); }

GridField sampled(int dim, double lo, double hi, double h, const SpaceField& f) {
  GridField g(make_grid(dim, Vec3::Constant(lo), Vec3::Constant(hi), h, 0.0));
  for (int i = 0; i < g.spec.shape[0]; ++i)
    for (int j = 0; j < g.spec.shape[1]; ++j)
      for (int k = 0; k < g.spec.shape[2]; ++k) g.at(i, j, k) = f(g.spec.node(i, j, k));
  return g;
}

Eigen::Matrix3d random_member(std::mt19937_64& rng, const CurvatureMatrixSet& set) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    const Eigen::Matrix3d q = Eigen::Quaterniond::UnitRandom().toRotationMatrix();
    const Eigen::Vector3d ev(set.B * u(rng), set.B * u(rng), set.B * u(rng));
    const Eigen::Matrix3d a = q * ev.asDiagonal() * q.transpose();
    if (set.contains(a)) return a;
  }
}

}  // namespace

TEST_CASE("mollifier has unit mass and compact support") {
  for (int dim : {2, 3}) {
    const double s = 0.7;
    const Mollifier m(dim, s);
    const double h = dim == 2 ? 0.004 : 0.02;
    const int n = static_cast<int>(std::ceil(s / h));
    double mass = 0.0;
    for (int i = -n; i <= n; ++i)
      for (int j = -n; j <= n; ++j)
        for (int k = dim == 3 ? -n : 0; k <= (dim == 3 ? n : 0); ++k) mass += m(h * Vec3(i, j, k));
    mass *= std::pow(h, dim);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(m(Vec3(s, 0, 0)) == 0.0);
    CHECK(m(Vec3(0, 0.9 * s, 0.5 * s)) == (dim == 2 ? doctest::Approx(m(Vec3(0, 0.9 * s, 0))) : doctest::Approx(0.0)));
    CHECK(m(Vec3::Zero()) > 0);
  }
}

TEST_CASE("mollify is exact on constants and affine fields") {
  const double h = 0.05;
  const GridField c = sampled(2, -1, 1, h, [](const Point&) { return 3.25; });
  const GridField mc = mollify(c, Mollifier(2, 3 * h));
  for (double v : mc.values) CHECK(v == doctest::Approx(3.25).epsilon(1e-14));

  const GridField a = sampled(3, -1, 1, 0.1, [](const Point& x) { return 0.5 * x.x() - 2 * x.y() + x.z() + 1; });
  const GridField ma = mollify(a, Mollifier(3, 0.25));
  const int reach = 3;
  const auto& g = a.spec;
  for (int i = reach; i < g.shape[0] - reach; ++i)
    for (int j = reach; j < g.shape[1] - reach; ++j)
      for (int k = reach; k < g.shape[2] - reach; ++k) CHECK(ma.at(i, j, k) == doctest::Approx(a.at(i, j, k)).epsilon(1e-12));

  CHECK_THROWS_WITH_AS(mollify(c, Mollifier(2, 1.9 * h)), "kernel under-resolved", DomainError);
}

TEST_CASE("mollified disk distance stays within s of the distance") {
  const ConvexBody d = disk(2048);
  const double h = 0.01, s = 0.05;
  GridField dist = d.sdf(h, 0.3);
  for (auto& v : dist.values) v = std::max(v, 0.0);
  const GridField ds = mollify(dist, Mollifier(2, s));
  const auto& g = dist.spec;
  const int reach = static_cast<int>(std::ceil(s / h));
  for (int i = 0; i < g.shape[0]; ++i)
    for (int j = 0; j < g.shape[1]; ++j) {
      const double v = ds.at(i, j), v0 = dist.at(i, j);
      CHECK(v >= v0 - s - 1e-12);
      CHECK(v <= v0 + s + 1e-12);
      double lo = INFINITY, hi = -INFINITY;
      for (int a = -reach; a <= reach; ++a)
        for (int b = -reach; b <= reach; ++b) {
          if (!g.inside(i + a, j + b) || std::hypot(a, b) * h >= s) continue;
          lo = std::min(lo, dist.at(i + a, j + b));
          hi = std::max(hi, dist.at(i + a, j + b));
        }
      CHECK(v >= lo - 1e-12);
      CHECK(v <= hi + 1e-12);
    }
}

TEST_CASE("level set curvature examples") {
  const Point x(0.6, -0.5, 0.7);
  for (int dim : {2, 3}) {
    const Point y = dim == 2 ? Point(0.6, -0.5, 0) : x;
    auto norm = [dim](const Point& p) { return dim == 2 ? p.head<2>().norm() : p.norm(); };
    const auto a = level_set_curvature(norm, dim, 1.0, y, 1e-4);
    CHECK(a.point.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.normal.dot(y.normalized()) == doctest::Approx(1.0).epsilon(1e-9));
    REQUIRE(a.shape.size() == std::size_t(dim - 1));
    for (double e : a.shape) CHECK(e == doctest::Approx(1.0).epsilon(1e-6));
    const auto b = level_set_curvature([&](const Point& p) { return norm(p) * norm(p); }, dim, 1.0, y, 1e-4);
    for (double e : b.shape) CHECK(e == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(b.gauss == doctest::Approx(1.0).epsilon(1e-6));
    const auto c = level_set_curvature([](const Point& p) { return 2 * p.x() - p.y() + 0.5 * p.z(); }, dim, 0.3, y, 1e-3);
    for (double e : c.shape) CHECK(std::abs(e) < 1e-8);
  }
  // Sphere of radius 2: shape eigenvalues 1/2.
  const auto r2 = level_set_curvature([](const Point& p) { return p.norm(); }, 3, 2.0, x, 1e-4);
  CHECK(r2.gauss == doctest::Approx(0.25).epsilon(1e-6));
  CHECK_THROWS_WITH_AS(level_set_curvature([](const Point& p) { return p.squaredNorm(); }, 3, 0.0, Point::Zero(), 1e-3),
                       "critical point: level set not a graph here", DomainError);
}

TEST_CASE("level set curvature on a sampled grid") {
  const GridField g = sampled(2, -2, 2, 0.01, [](const Point& p) { return p.head<2>().norm(); });
  const auto a = level_set_curvature(g, 1.0, Point(0.3, 0.9, 0));
  CHECK(a.point.norm() == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(a.gauss == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("curvature matrix set membership and convexity") {
  CurvatureMatrixSet set{3, 0.25, 2.0, Vec3(1, 1, 1).normalized()};
  CHECK(set.contains(Eigen::Matrix3d::Identity()));
  CHECK_FALSE(set.contains(2.5 * Eigen::Matrix3d::Identity()));
  CHECK_FALSE(set.contains(0.2 * Eigen::Matrix3d::Identity()));  // 0.04 < k^2 on the plane
  CHECK(set.contains(0.3 * Eigen::Matrix3d::Identity()));
  Eigen::Matrix3d indefinite = Eigen::Matrix3d::Identity();
  indefinite(2, 2) = -0.1;
  CHECK_FALSE(set.contains(indefinite));
  CurvatureMatrixSet planar{2, 0.25, 1.0, Vec3::UnitY()};
  Eigen::Matrix3d p = Eigen::Matrix3d::Zero();
  p(0, 0) = 0.3;
  CHECK(planar.contains(p));
  p(0, 0) = 0.2;
  CHECK_FALSE(planar.contains(p));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Matrix3d a0 = random_member(rng, set), a1 = random_member(rng, set);
    const double t = u(rng);
    CHECK(set.contains((1 - t) * a0 + t * a1, 1e-12));
  }
}

TEST_CASE("intersection of bodies") {
  const ConvexBody a = box(2, Vec3(0, 0, 0), Vec3(2, 1, 0)), b = box(2, Vec3(1, -1, 0), Vec3(3, 0.5, 0));
  CHECK(intersect(a, b).volume() == doctest::Approx(0.5).epsilon(1e-12));
  const ConvexBody d1 = disk(4096, 1.0, Point(-0.3, 0, 0)), d2 = disk(4096, 1.0, Point(0.3, 0, 0));
  CHECK(intersect(d1, d2).volume() == doctest::Approx(lens_area(1.0, 0.6)).epsilon(1e-5));
  const ConvexBody c1 = box(3, Vec3(0, 0, 0), Vec3(1, 1, 1)), c2 = box(3, Vec3(0.5, 0.25, -1), Vec3(2, 2, 0.5));
  CHECK(intersect(c1, c2).volume() == doctest::Approx(0.5 * 0.75 * 0.5).epsilon(1e-12));
  const ConvexBody tet(3, {Point(0, 0, 0), Point(1, 0, 0), Point(0, 1, 0), Point(0, 0, 1)});
  CHECK(intersect(tet, ball(3, 5.0)).volume() == doctest::Approx(1.0 / 6).epsilon(1e-12));
  CHECK_THROWS_AS(intersect(disk(64), disk(64, 1.0, Point(3, 0, 0))), DomainError);
}

TEST_CASE("smooth intersection of identical disks is the offset circle") {
  const ConvexBody d = disk(4096);
  const auto s = smooth_intersection(d, d, 1.0, 0.1);
  const double r_max = 0.1 / 0.9;
  CHECK(s.r == doctest::Approx(r_max / 2));
  CHECK(s.s == doctest::Approx(s.r / 8));
  for (const auto& p : s.samples) CHECK(std::abs(p.norm() - (1 + s.r)) <= s.s);
  CHECK(s.min_curvature >= 0.9);
  CHECK(s.min_curvature == doctest::Approx(1 / (1 + s.r)).epsilon(0.02));
}

TEST_CASE("smooth intersection rounds the lens corners") {
  const ConvexBody d1 = disk(4096, 1.0, Point(-0.3, 0, 0)), d2 = disk(4096, 1.0, Point(0.3, 0, 0));
  const auto s = smooth_intersection(d1, d2, 1.0, 0.1);
  const ConvexBody inter = intersect(d1, d2);
  CHECK(s.min_curvature >= 0.9);
  for (const auto& v : inter.vertices()) CHECK(s.body.contains(v, 1e-12));
  CHECK(hausdorff_distance(s.body, inter, HausdorffConvention::max) <= 1.5 * s.r);

  SUBCASE("re-fed output keeps curvature above k - 2 eps") {
    SmoothingOptions o;
    o.iteration = 2;
    const auto again = smooth_intersection(s.body, disk(4096, 1.0, Point(0, 0.4, 0)), 1.0, 0.1, o);
    CHECK(again.min_curvature >= 0.8);
  }
}

TEST_CASE("smooth intersection contains the intersection for random disk pairs") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> c(-0.8, 0.8), rad(0.8, 1.5);
  SmoothingOptions o;
  o.r = 0.08;
  for (int trial = 0; trial < 20; ++trial) {
    const ConvexBody a = disk(1024, rad(rng), Point(c(rng), c(rng), 0));
    const ConvexBody b = disk(1024, rad(rng), Point(c(rng), c(rng), 0));
    const auto s = smooth_intersection(a, b, 0.25, 0.1, o);
    const ConvexBody inter = intersect(a, b);
    for (const auto& v : inter.vertices()) CHECK(s.body.contains(v, 1e-12));
  }
}

TEST_CASE("smooth intersection errors") {
  CHECK_THROWS_WITH_AS(smooth_intersection(disk(64), disk(64, 1.0, Point(3, 0, 0)), 1.0, 0.1),
                       "empty or degenerate intersection", DomainError);
  SmoothingOptions o;
  o.max_nodes = 1000;
  CHECK_THROWS_WITH_AS(smooth_intersection(disk(256), disk(256), 1.0, 0.1, o), "smoothing window not found", DomainError);
  o = {};
  o.s = 0.5;
  o.r = 0.1;
  CHECK_THROWS_WITH_AS(smooth_intersection(disk(256), disk(256), 1.0, 0.1, o), "smoothing window not found", DomainError);
}

TEST_CASE("volume examples") {
  CHECK(volume(box(2, Vec3(0, 0, 0), Vec3(1, 1, 0))) == doctest::Approx(1.0));
  CHECK(volume(ball(4)) == doctest::Approx(4 * std::numbers::pi / 3).epsilon(0.01));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> f(0.3, 0.99);
  const ConvexBody k = ball(2);
  for (int t = 0; t < 20; ++t) {
    std::vector<Point> pts;
    const double s = f(rng);
    for (const auto& v : k.vertices()) pts.push_back(s * v);
    CHECK(volume(ConvexBody(3, pts)) < volume(k));
    CHECK(volume(ConvexBody(3, pts)) == doctest::Approx(s * s * s * volume(k)).epsilon(1e-12));
  }
}
