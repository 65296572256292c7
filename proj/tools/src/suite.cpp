#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <thread>

#include "kplateau/direction_grid.hpp"
#include "kplateau/spherical.hpp"
#include "kplateau_app/app.hpp"

namespace kplateau::app {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
using Rng = std::mt19937_64;

std::vector<Point> cloud(Rng& rng, int dim, int n, double spread = 1.0) {
  std::normal_distribution<double> g(0.0, spread);
  std::vector<Point> p;
  for (int i = 0; i < n; ++i) p.emplace_back(g(rng), g(rng), dim == 3 ? g(rng) : 0.0);
  return p;
}

Vec3 direction(Rng& rng, int dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  return Vec3(g(rng), g(rng), dim == 3 ? g(rng) : 0.0).normalized();
}

ConvexBody full_body(Rng& rng, int dim, int n) {
  for (;;) {
    ConvexBody k(dim, cloud(rng, dim, n));
    if (k.full_dimensional()) return k;
  }
}

// n directions within angle `spread` of `center`.
DirectionSet cap_cloud(Rng& rng, int dim, const Vec3& center, double spread, int n) {
  std::uniform_real_distribution<double> t(0.0, 1.0);
  DirectionSet s(dim, DirectionKind::generic);
  while (static_cast<int>(s.size()) < n) {
    const Vec3 u = direction(rng, dim);
    const Vec3 tangent = u - u.dot(center) * center;
    if (tangent.norm() < 1e-9) continue;
    const double a = spread * (dim == 2 ? t(rng) : std::sqrt(t(rng)));
    s.add(std::cos(a) * center + std::sin(a) * tangent.normalized());
  }
  return s;
}

using Key = std::array<long long, 3>;
Key key(const Vec3& u) { return {std::llround(u.x() * 1e9), std::llround(u.y() * 1e9), std::llround(u.z() * 1e9)}; }

// Members of a that are also grid members of b.
DirectionSet common(const DirectionSet& a, const DirectionSet& b) {
  std::set<Key> in_b;
  for (const auto& v : b.directions) in_b.insert(key(v));
  DirectionSet out(a.dim, a.kind);
  for (const auto& u : a.directions)
    if (in_b.count(key(u))) out.directions.push_back(u);
  return out;
}

DirectionSet unite(const DirectionSet& a, const DirectionSet& b) {
  DirectionSet out = a;
  for (const auto& v : b.directions) out.add(v);
  return out;
}

struct Tally {
  GroupResult r;
  void record(double violation) {
    ++r.cases;
    r.worst = std::max(r.worst, violation);
    if (!(violation <= r.tolerance)) ++r.failures;
  }
};

GroupResult hausdorff_metric(Rng& rng, int cases) {
  Tally t{{"hausdorff_metric", 0, 0, 0.0, 1e-9}};
  for (int i = 0; i < cases; ++i) {
    const int dim = 2 + i % 2;
    const ConvexBody a(dim, cloud(rng, dim, 12)), b(dim, cloud(rng, dim, 12)), c(dim, cloud(rng, dim, 12));
    const double ab = hausdorff_distance(a, b), ba = hausdorff_distance(b, a);
    const double v = std::max({-ab, std::abs(ab - ba), ab - hausdorff_distance(a, c) - hausdorff_distance(c, b),
                               hausdorff_distance(a, a)});
    t.record(v);
  }
  return t.r;
}

GroupResult projection_lipschitz(Rng& rng, int cases) {
  Tally t{{"projection_lipschitz", 0, 0, 0.0, 1e-9}};
  for (int i = 0; i < cases; ++i) {
    const int dim = 2 + i % 2;
    const ConvexBody k = full_body(rng, dim, 30);
    const auto xy = cloud(rng, dim, 2, 2.0);
    t.record((k.project(xy[0]).point - k.project(xy[1]).point).norm() - (xy[0] - xy[1]).norm());
  }
  return t.r;
}

GroupResult distance_convexity(Rng& rng, int cases) {
  Tally t{{"distance_convexity", 0, 0, 0.0, 1e-9}};
  std::uniform_real_distribution<double> u01(0, 1);
  for (int i = 0; i < cases; ++i) {
    const int dim = 2 + i % 2;
    const ConvexBody k = full_body(rng, dim, 30);
    const auto xy = cloud(rng, dim, 2, 2.0);
    const double s = u01(rng);
    t.record(k.distance((1 - s) * xy[0] + s * xy[1]) - (1 - s) * k.distance(xy[0]) - s * k.distance(xy[1]));
  }
  return t.r;
}

GroupResult hull_idempotence(Rng& rng, int cases) {
  Tally t{{"hull_idempotence", 0, 0, 0.0, 1e-9}};
  for (int i = 0; i < cases; ++i) {
    const int dim = 2 + i % 2;
    const auto p = cloud(rng, dim, 20);
    const ConvexBody h = convex_hull(dim, p);
    const ConvexBody hh = convex_hull(dim, h.vertices());
    double v = hh.vertices().size() == h.vertices().size() ? 0.0 : 1.0;
    for (std::size_t j = 0; j < h.vertices().size() && v == 0.0; ++j) v = (hh.vertices()[j] - h.vertices()[j]).norm();
    for (const auto& q : p) v = std::max(v, h.signed_distance(q));
    t.record(v);
  }
  return t.r;
}

GroupResult closest_point(Rng& rng, int cases) {
  Tally t{{"closest_point_normal", 0, 0, 0.0, 1e-9}};
  for (int i = 0; i < cases; ++i) {
    const int dim = 2 + i % 2;
    const ConvexBody k = full_body(rng, dim, 25);
    Point x;
    Projection p;
    do {
      x = cloud(rng, dim, 1, 3.0)[0];
      p = k.project(x);
    } while (p.distance < 1e-6);
    const Vec3 u = (x - p.point) / p.distance;
    // <y - p, u> <= 0 on K, and u lies in the sampled normal cone up to one grid cell.
    const double res = (dim == 2 ? 1.0 : 4.0) * kDeg;
    const auto n = supporting_normals(k, p.point, {.angular_res = res});
    double best = 10;
    for (const auto& v : n.directions) best = std::min(best, angle_between(u, v));
    t.record(std::max(k.support(u) - p.point.dot(u), best - grid_spacing(dim, res)));
  }
  return t.r;
}

GroupResult link_normal_duality(Rng& rng, int cases, double res) {
  Tally t{{"link_normal_duality", 0, 0, 0.0, 2 * res}};
  LinkOptions lo;
  lo.angular_res = res;
  DualOptions d;
  d.angular_res = res;
  for (int i = 0; i < cases; ++i) {
    const ConvexBody k = full_body(rng, 2, 12);
    double worst = 0;
    std::vector<Point> at = k.vertices();
    const auto& f = k.facets()[0];
    at.push_back(0.5 * (k.vertices()[f.v[0]] + k.vertices()[f.v[1]]));
    for (const auto& x : at) {
      const SphericalSet n(supporting_normals(k, x, {.angular_res = res}));
      worst = std::max(worst, spherical_set_distance(n, dual_set(link(k, x, lo), d)));
    }
    t.record(worst);
  }
  return t.r;
}

GroupResult double_dual(Rng& rng, int cases, double res) {
  Tally t{{"double_dual_is_hull", 0, 0, 0.0, 2 * res}};
  DualOptions d;
  d.angular_res = res;
  for (int i = 0; i < cases; ++i) {
    const SphericalSet x(cap_cloud(rng, 2, direction(rng, 2), 0.5, 8));
    t.record(spherical_set_distance(dual_set(dual_set(x, d), d), spherical_convex_hull(x, res)));
  }
  return t.r;
}

GroupResult union_law(Rng& rng, int cases, double res) {
  Tally t{{"dual_of_union", 0, 0, 0.0, 2 * res}};
  DualOptions grid;
  grid.angular_res = res;
  grid.fill_boundary = false;
  DualOptions filled = grid;
  filled.fill_boundary = true;
  for (int i = 0; i < cases; ++i) {
    const Vec3 c1 = direction(rng, 2);
    const Vec3 c2 = (c1 + 0.4 * direction(rng, 2)).normalized();
    const auto x1 = cap_cloud(rng, 2, c1, 0.35, 10), x2 = cap_cloud(rng, 2, c2, 0.35, 10);
    const SphericalSet u(unite(x1, x2));
    // On the shared grid the law is exact; with boundary completion it holds to resolution.
    const auto du = dual_set(u, grid);
    const auto meet = common(dual_set(SphericalSet(x1), grid).set, dual_set(SphericalSet(x2), grid).set);
    double v = angular_hausdorff(meet, du.set);
    if (!std::isfinite(v)) v = (meet.empty() && du.empty()) ? 0.0 : 10.0;
    const auto dfu = dual_set(u, filled);
    const auto fmeet = common(dual_set(SphericalSet(x1), filled).set, dual_set(SphericalSet(x2), filled).set);
    v = std::max(v, spherical_set_distance(dfu, SphericalSet(fmeet)));
    t.record(v);
  }
  return t.r;
}

GroupResult intersection_law(Rng& rng, int cases, double res) {
  Tally t{{"dual_of_intersection", 0, 0, 0.0, 2 * res}};
  DualOptions d;
  d.angular_res = res;
  for (int guard = 0; t.r.cases < cases && guard < 20 * cases; ++guard) {
    const Vec3 c1 = direction(rng, 2);
    const Vec3 c2 = (c1 + 0.3 * direction(rng, 2)).normalized();
    const auto h1 = spherical_convex_hull(SphericalSet(cap_cloud(rng, 2, c1, 0.6, 10)), res);
    const auto h2 = spherical_convex_hull(SphericalSet(cap_cloud(rng, 2, c2, 0.6, 10)), res);
    const SphericalSet meet(common(h1.set, h2.set));
    if (meet.size() < 3) continue;
    const auto lhs = dual_set(meet, d);
    const auto rhs = spherical_convex_hull(SphericalSet(unite(dual_set(h1, d).set, dual_set(h2, d).set)), res);
    t.record(spherical_set_distance(lhs, rhs));
  }
  return t.r;
}

GroupResult hemisphere_criterion(Rng& rng, int cases, double res) {
  Tally t{{"nonempty_dual_iff_hemisphere", 0, 0, 0.0, 0.0}};
  DualOptions d;
  d.angular_res = std::max(res, 3 * kDeg);
  for (int i = 0; i < cases; ++i) {
    const int dim = 2 + i % 2;
    const double spread = i % 4 < 2 ? 0.7 : 2.2;
    const SphericalSet x(cap_cloud(rng, dim, direction(rng, dim), spread, 15));
    const auto dual = dual_set(x, d);
    const bool ok = dual.empty() != x.strictly_in_hemisphere && (dual.empty() || dual.strictly_in_hemisphere);
    t.record(ok ? 0.0 : 1.0);
  }
  return t.r;
}

}  // namespace

std::vector<GroupResult> geometry_suite(const SuiteOptions& opts) {
  const double res = opts.angular_res_deg * kDeg;
  using Group = std::function<GroupResult(Rng&)>;
  const int n = opts.cases, m = opts.duality_cases;
  const std::vector<Group> groups{
      [n](Rng& r) { return hausdorff_metric(r, n); },
      [n](Rng& r) { return projection_lipschitz(r, n); },
      [n](Rng& r) { return distance_convexity(r, n); },
      [n](Rng& r) { return hull_idempotence(r, n); },
      [n](Rng& r) { return closest_point(r, n); },
      [m, res](Rng& r) { return link_normal_duality(r, m, res); },
      [m, res](Rng& r) { return double_dual(r, m, res); },
      [m, res](Rng& r) { return union_law(r, m, res); },
      [m, res](Rng& r) { return intersection_law(r, m, res); },
      [m, res](Rng& r) { return hemisphere_criterion(r, m, res); },
  };
  // Each group draws from its own stream so results do not depend on scheduling.
  const auto run_group = [&](std::size_t g) {
    std::seed_seq seq{std::uint32_t(opts.seed), std::uint32_t(opts.seed >> 32), std::uint32_t(g)};
    Rng rng(seq);
    return groups[g](rng);
  };
  std::vector<GroupResult> out(groups.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t g; (g = next++) < groups.size();) out[g] = run_group(g);
  };
  const int workers = std::clamp(opts.threads, 1, static_cast<int>(groups.size()));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace kplateau::app
