#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "kplateau/convex_kernel.hpp"
#include "kplateau/direction_grid.hpp"
#include "kplateau/shapes.hpp"

using namespace kplateau;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

ConvexBody unit_square() { return box(2, Vec3(0, 0, 0), Vec3(1, 1, 0)); }

std::vector<Point> random_cloud(std::mt19937_64& rng, int dim, int n, double spread = 1.0) {
  std::normal_distribution<double> g(0.0, spread);
  std::vector<Point> p;
  for (int i = 0; i < n; ++i) p.emplace_back(g(rng), g(rng), dim == 3 ? g(rng) : 0.0);
  return p;
}

bool contains_direction(const DirectionSet& s, const Vec3& u, double tol = 1e-9) {
  for (const auto& v : s.directions)
    if (angle_between(u, v) < tol) return true;
  return false;
}

}  // namespace

TEST_CASE("hausdorff distance examples") {
  const auto sq = unit_square();
  CHECK(hausdorff_distance(sq, sq) == 0.0);
  std::vector<Point> a{{0, 0, 0}}, b{{3, 4, 0}};
  CHECK(hausdorff_distance(a, b) == doctest::Approx(10.0));
  CHECK(hausdorff_distance(a, b, HausdorffConvention::max) == doctest::Approx(5.0));
  const auto d = disk(720);
  std::vector<Point> origin{Point::Zero()};
  CHECK(hausdorff_distance(d, origin) == doctest::Approx(1.0));
  std::vector<Point> empty;
  CHECK_THROWS_AS(hausdorff_distance(empty, b), DomainError);
}

TEST_CASE("distance and projection examples") {
  const auto d = disk(3600);
  auto p = distance_and_project(d, Point(2, 0, 0));
  CHECK(p.distance == doctest::Approx(1.0));
  CHECK((p.point - Point(1, 0, 0)).norm() < 1e-12);
  p = distance_and_project(d, Point(0.2, 0.1, 0));
  CHECK(p.distance == 0.0);
  CHECK(p.point == Point(0.2, 0.1, 0));
  p = distance_and_project(unit_square(), Point(2, 2, 0));
  CHECK(p.distance == doctest::Approx(std::sqrt(2.0)));
  CHECK((p.point - Point(1, 1, 0)).norm() < 1e-12);
  CHECK(unit_square().signed_distance(Point(0.5, 0.25, 0)) == doctest::Approx(-0.25));
  CHECK(ball(3).signed_distance(Point(0, 0, 0)) < -0.9);
  CHECK(ball(3).signed_distance(Point(0, 0, 2)) == doctest::Approx(1.0));
}

TEST_CASE("supporting normals of a smooth point is a single direction") {
  const auto d = disk(360);
  auto n = supporting_normals(d, Point(1, 0, 0));
  REQUIRE(n.size() == 1);
  CHECK(angle_between(n.directions[0], Vec3::UnitX()) < 1e-12);
  CHECK(n.kind == DirectionKind::supporting_normals);
}

TEST_CASE("supporting normals at a square corner form the quarter arc") {
  const auto sq = unit_square();
  const Point x(1, 1, 0);
  const auto n = supporting_normals(sq, x);
  // brute force over the four vertices on the 1 degree grid
  DirectionSet oracle(2, DirectionKind::supporting_normals);
  for (int i = 0; i < 360; ++i) {
    const Vec3 u(std::cos(i * kDeg), std::sin(i * kDeg), 0);
    bool ok = true;
    for (const auto& v : sq.vertices()) ok = ok && (v - x).dot(u) <= 1e-12;
    if (ok) oracle.add(u);
  }
  CHECK(oracle.size() == 91);
  CHECK(n.size() == oracle.size());
  CHECK(angular_hausdorff(n, oracle) < 1e-9);
}

TEST_CASE("supporting normals of a segment include both sides") {
  std::vector<Point> seg{{0, 0, 0}, {1, 0, 0}};
  ConvexBody s(2, seg);
  CHECK(s.degenerate());
  auto n = supporting_normals(s, Point(0.5, 0, 0));
  CHECK(contains_direction(n, Vec3::UnitY()));
  CHECK(contains_direction(n, -Vec3::UnitY()));
}

TEST_CASE("supporting normals reject interior points") {
  CHECK_THROWS_WITH_AS(supporting_normals(unit_square(), Point(0.5, 0.5, 0)),
                       "no supporting normal at interior point", DomainError);
}

TEST_CASE("supporting normals on a polygon edge fall back to the facet normal") {
  const auto d = disk(7);
  const Point x = 0.5 * (d.vertices()[0] + d.vertices()[1]);
  auto n = supporting_normals(d, x);
  REQUIRE(n.size() == 1);
  CHECK(d.support(n.directions[0]) - x.dot(n.directions[0]) < 1e-12);
}

TEST_CASE("convex hull examples") {
  std::vector<Point> p{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0.5, 0.5, 0}};
  auto h = convex_hull(2, p);
  CHECK(h.vertices().size() == 4);
  auto again = convex_hull(2, h.vertices());
  CHECK(again.vertices() == h.vertices());
  std::vector<Point> one{{1, 2, 0}};
  CHECK(convex_hull(2, one).affine_dim() == 0);
}

TEST_CASE("convex hull agrees with the half-space membership oracle") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Point> p;
  while (p.size() < 50) {
    Point q(u(rng), u(rng), 0);
    if (q.norm() < 1) p.push_back(q);
  }
  const auto h = convex_hull(2, p);
  // half-planes through pairs of input points with every input on one side
  std::vector<std::pair<Vec3, double>> planes;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (i == j) continue;
      const Vec3 d = p[j] - p[i];
      const Vec3 n(d.y(), -d.x(), 0);
      const double off = n.dot(p[i]);
      bool all = true;
      for (const auto& q : p) all = all && n.dot(q) <= off + 1e-12;
      if (all) planes.emplace_back(n, off);
    }
  int agree = 0;
  for (int t = 0; t < 1000; ++t) {
    const Point q(1.2 * u(rng), 1.2 * u(rng), 0);
    bool in = true;
    for (const auto& [n, off] : planes) in = in && n.dot(q) <= off;
    agree += in == h.contains(q);
  }
  CHECK(agree == 1000);
}

TEST_CASE("graph chart of the ball at the south pole") {
  const auto b = ball(5);
  const auto c = extract_graph_chart(b, Point(0, 0, -1), std::numbers::pi / 4);
  CHECK(c.lipschitz == doctest::Approx(1.0));
  CHECK(c.radius == c.r / std::sqrt(1.0 + 4.0 * c.lipschitz * c.lipschitz));
  CHECK(c.radius == doctest::Approx(c.r / std::sqrt(5.0)).epsilon(1e-15));
  CHECK((c.axis() - Vec3::UnitZ()).norm() < 1e-9);
  double worst = 0;
  for (int i = 0; i < c.samples; ++i)
    for (int j = 0; j < c.samples; ++j) {
      const double v = c.value(i, j);
      if (std::isnan(v)) continue;
      const double rho = c.coord(i, j).norm();
      worst = std::max(worst, std::abs(v - (1 - std::sqrt(1 - rho * rho))));
    }
  CHECK(worst < 5e-4);
  CHECK(std::abs(c.value(c.samples / 2, c.samples / 2)) < 1e-12);
}

TEST_CASE("graph chart invariants: convex and Lipschitz samples") {
  const auto b = ball(4, 1.0, Point(0.1, 0.2, -0.3));
  const auto x = b.vertices()[17];
  const auto c = extract_graph_chart(b, x, 1.0);
  std::vector<std::pair<Eigen::Vector2d, double>> s;
  for (int i = 0; i < c.samples; ++i)
    for (int j = 0; j < c.samples; ++j)
      if (!std::isnan(c.value(i, j))) s.emplace_back(c.coord(i, j), c.value(i, j));
  REQUIRE(s.size() > 100);
  for (std::size_t a = 0; a < s.size(); a += 7)
    for (std::size_t bb = 0; bb < s.size(); bb += 5) {
      const double gap = (s[a].first - s[bb].first).norm();
      CHECK(std::abs(s[a].second - s[bb].second) <= c.lipschitz * gap + 1e-12);
      const Eigen::Vector2d mid = 0.5 * (s[a].first + s[bb].first);
      const double fm = envelope_height(b, c.base_point, c.frame, 3, mid);
      CHECK(fm <= 0.5 * (s[a].second + s[bb].second) + 1e-12);
    }
}

TEST_CASE("graph chart boundary matches the body") {
  const auto b = ball(4);
  const auto c = extract_graph_chart(b, b.vertices()[3], 0.8);
  for (int i = 0; i < c.samples; i += 3)
    for (int j = 0; j < c.samples; j += 3) {
      const double v = c.value(i, j);
      if (std::isnan(v)) continue;
      CHECK(std::abs(b.signed_distance(c.to_world(c.coord(i, j), v))) < 1e-12);
    }
}

TEST_CASE("graph chart on a flat face is zero") {
  const auto bx = box(3, Vec3(-1, -1, -1), Vec3(1, 1, 1));
  const auto c = extract_graph_chart(bx, Point(0.1, 0.2, -1), 0.1);
  for (double v : c.values)
    if (!std::isnan(v)) CHECK(std::abs(v) < 1e-12);
  CHECK_THROWS_WITH(extract_graph_chart(bx, Point(1, 1, 1), 0.1), "no admissible chart radius");
}

TEST_CASE("local geodesic property examples") {
  const auto sq = unit_square();
  CHECK(has_local_geodesic_property(sq, Point(0.5, 0, 0)));
  CHECK_FALSE(has_local_geodesic_property(sq, Point(1, 1, 0)));
  CHECK(has_local_geodesic_property(sq, Point(0.5, 0.5, 0)));
  CHECK_FALSE(has_local_geodesic_property(disk(720), Point(1, 0, 0)));
  CHECK_THROWS_AS(has_local_geodesic_property(sq, Point(2, 0, 0)), DomainError);
  const auto b = ball(3);
  CHECK_FALSE(has_local_geodesic_property(b, Point(0, 0, 1)));
  const auto f = b.facets()[0];
  const Point mid = (b.vertices()[f.v[0]] + b.vertices()[f.v[1]] + b.vertices()[f.v[2]]) / 3.0;
  CHECK(has_local_geodesic_property(b, mid));
  CHECK(has_local_geodesic_property(b, mid, {.sample_directions = false}));
}

TEST_CASE("hausdorff metric axioms on random clouds") {
  std::mt19937_64 rng(17);
  for (int dim : {2, 3}) {
    for (int t = 0; t < 40; ++t) {
      const ConvexBody a(dim, random_cloud(rng, dim, 12));
      const ConvexBody b(dim, random_cloud(rng, dim, 12));
      const ConvexBody c(dim, random_cloud(rng, dim, 12));
      const double ab = hausdorff_distance(a, b), ba = hausdorff_distance(b, a);
      CHECK(ab >= 0);
      CHECK(std::abs(ab - ba) < 1e-9);
      CHECK(ab <= hausdorff_distance(a, c) + hausdorff_distance(c, b) + 1e-9);
      CHECK(hausdorff_distance(a, a) < 1e-12);
    }
  }
}

TEST_CASE("projection is 1-Lipschitz and distance is convex") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> t01(0, 1);
  for (int dim : {2, 3}) {
    const ConvexBody k(dim, random_cloud(rng, dim, 30));
    for (int t = 0; t < 200; ++t) {
      const auto pq = random_cloud(rng, dim, 2, 2.0);
      const auto px = k.project(pq[0]), py = k.project(pq[1]);
      CHECK((px.point - py.point).norm() <= (pq[0] - pq[1]).norm() + 1e-9);
      const double s = t01(rng);
      CHECK(k.distance((1 - s) * pq[0] + s * pq[1]) <= (1 - s) * px.distance + s * py.distance + 1e-9);
    }
  }
}

TEST_CASE("closest point characterization") {
  std::mt19937_64 rng(29);
  for (int dim : {2, 3}) {
    const ConvexBody k(dim, random_cloud(rng, dim, 25));
    for (int t = 0; t < 60; ++t) {
      const Point x = random_cloud(rng, dim, 1, 3.0)[0];
      const auto p = k.project(x);
      if (p.distance < 1e-9) continue;
      const Vec3 u = (x - p.point) / p.distance;
      CHECK(k.support(u) - p.point.dot(u) <= 1e-9);
      const auto n = supporting_normals(k, p.point, {.angular_res = (dim == 2 ? 1.0 : 4.0) * kDeg});
      double best = 10;
      for (const auto& v : n.directions) best = std::min(best, angle_between(u, v));
      // the exact normal lies within one grid cell of the sampled cone
      CHECK(best <= grid_spacing(dim, (dim == 2 ? 1.0 : 4.0) * kDeg) + 1e-9);
    }
  }
}

TEST_CASE("hull and local geodesic property duality on random polygons") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> t01(0.05, 0.95);
  for (int trial = 0; trial < 20; ++trial) {
    const ConvexBody k(2, random_cloud(rng, 2, 15));
    const auto& v = k.vertices();
    for (const auto& f : k.facets()) {
      const double s = t01(rng);
      const Point y = (1 - s) * v[f.v[0]] + s * v[f.v[1]];
      CHECK(has_local_geodesic_property(k, y));
    }
    for (const auto& x : v) CHECK_FALSE(has_local_geodesic_property(k, x));
  }
}

TEST_CASE("supporting normals vary continuously under vertex perturbation") {
  std::mt19937_64 rng(37);
  const auto base = disk(9).vertices();
  double prev = 10;
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    std::normal_distribution<double> g(0, eps);
    auto pts = base;
    for (auto& p : pts) p += Point(g(rng), g(rng), 0);
    const ConvexBody k(2, pts);
    const ConvexBody k0(2, base);
    double worst = 0;
    for (std::size_t i = 0; i < base.size(); ++i) {
      const auto n0 = supporting_normals(k0, base[i]);
      const auto n1 = supporting_normals(k, k.project(pts[i]).point);
      worst = std::max(worst, angular_hausdorff(n0, n1));
    }
    CHECK(worst <= prev + 2 * kDeg);
    prev = worst;
  }
  CHECK(prev <= 2 * kDeg);
}
