#include "kplateau/convex_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "kplateau/direction_grid.hpp"
#include "kplateau/min_norm_point.hpp"

namespace kplateau {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double combine(double ab, double ba, HausdorffConvention c) {
  return c == HausdorffConvention::sum ? ab + ba : std::max(ab, ba);
}

// Moves x onto the boundary; throws for interior points or far-off points.
BoundaryHit snap_to_boundary(const ConvexBody& k, const Point& x, double boundary_tol) {
  const double tol = boundary_tol < 0 ? 1e-7 * k.scale() : boundary_tol;
  const double sd = k.signed_distance(x);
  if (sd < -tol) throw DomainError("no supporting normal at interior point");
  if (sd > tol) throw DomainError("point is not on the boundary");
  return k.closest_boundary_point(x);
}

Eigen::Matrix3d frame_from_axis(const Vec3& axis, int dim) {
  Eigen::Matrix3d f;
  if (dim == 2) {
    f.col(0) = Vec3(axis.y(), -axis.x(), 0.0);
    f.col(1) = axis;
    f.col(2) = Vec3::UnitZ();
  } else {
    const Vec3 e1 = axis.unitOrthogonal();
    f.col(0) = e1;
    f.col(1) = axis.cross(e1);
    f.col(2) = axis;
  }
  return f;
}

}  // namespace

std::string to_string(DirectionKind k) {
  switch (k) {
    case DirectionKind::supporting_normals: return "supporting_normals";
    case DirectionKind::link: return "link";
    case DirectionKind::dual: return "dual";
    case DirectionKind::generic: return "generic";
  }
  return "generic";
}

bool DirectionSet::add(const Vec3& u) {
  const double len = u.norm();
  require(len > 0, "zero direction");
  const Vec3 v = u / len;
  for (const auto& w : directions)
    if (angle_between(v, w) < 1e-9) return false;
  directions.push_back(v);
  return true;
}

double angular_hausdorff(const DirectionSet& a, const DirectionSet& b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return kInf;
  // Work with inner products; the angle is taken once at the end.
  auto directed = [](const DirectionSet& p, const DirectionSet& q) {
    double worst = 2.0;
    Vec3 wu = p.directions.front(), wv = q.directions.front();
    for (const auto& u : p.directions) {
      double best = -2.0;
      const Vec3* arg = &q.directions.front();
      for (const auto& v : q.directions) {
        const double c = u.dot(v);
        if (c > best) best = c, arg = &v;
        if (best >= worst) break;
      }
      if (best < worst) worst = best, wu = u, wv = *arg;
    }
    return angle_between(wu, wv);
  };
  return std::max(directed(a, b), directed(b, a));
}

double directed_hausdorff(std::span<const Point> a, std::span<const Point> b) {
  require(!a.empty() && !b.empty(), "Hausdorff distance of an empty set");
  double worst2 = 0.0;
  for (const auto& x : a) {
    double best2 = kInf;
    for (const auto& y : b) {
      best2 = std::min(best2, (x - y).squaredNorm());
      if (best2 <= worst2) break;
    }
    worst2 = std::max(worst2, best2);
  }
  return std::sqrt(worst2);
}

double hausdorff_distance(std::span<const Point> a, std::span<const Point> b, HausdorffConvention c) {
  return combine(directed_hausdorff(a, b), directed_hausdorff(b, a), c);
}

double hausdorff_distance(const ConvexBody& a, const ConvexBody& b, HausdorffConvention c) {
  require(a.valid() && b.valid(), "Hausdorff distance of an empty set");
  require(a.dim() == b.dim(), "Hausdorff distance across dimensions");
  double ab = 0.0, ba = 0.0;
  for (const auto& v : a.vertices()) ab = std::max(ab, b.distance(v));
  for (const auto& v : b.vertices()) ba = std::max(ba, a.distance(v));
  return combine(ab, ba, c);
}

double hausdorff_distance(const ConvexBody& a, std::span<const Point> b, HausdorffConvention c) {
  require(a.valid() && !b.empty(), "Hausdorff distance of an empty set");
  double ba = 0.0;
  for (const auto& y : b) ba = std::max(ba, a.distance(y));
  return combine(directed_hausdorff(a.vertices(), b), ba, c);
}

double hausdorff_distance(std::span<const Point> a, const ConvexBody& b, HausdorffConvention c) {
  return hausdorff_distance(b, a, c);
}

Projection distance_and_project(const ConvexBody& k, const Point& x) { return k.project(x); }

DirectionSet supporting_normals(const ConvexBody& k, const Point& x, const NormalOptions& opt) {
  const BoundaryHit hit = snap_to_boundary(k, x, opt.boundary_tol);
  const double tol = opt.tol < 0 ? 1e-12 * k.scale() : opt.tol;
  const auto& dirs = sphere_directions(k.dim(), opt.angular_res);
  const auto& h = k.support_samples(opt.angular_res);
  DirectionSet out(k.dim(), DirectionKind::supporting_normals);
  for (std::size_t i = 0; i < dirs.size(); ++i)
    if (h[i] - hit.point.dot(dirs[i]) <= tol) out.directions.push_back(dirs[i]);
  // Cones thinner than the grid (edges, faces, near-smooth vertices) are
  // filled in from their exact generators and the arcs between them.
  std::vector<Vec3> gens;
  for (int f : k.facets_near(hit.point, std::max(tol, 1e-12 * k.scale()))) gens.push_back(k.facets()[f].normal);
  if (gens.empty() && hit.facet >= 0) gens.push_back(k.facets()[hit.facet].normal);
  const double gap = 0.5 * grid_spacing(k.dim(), opt.angular_res) * (1 + 1e-6);
  auto far_from_set = [&](const Vec3& u) {
    for (const auto& v : out.directions)
      if (angle_between(u, v) <= gap) return false;
    return true;
  };
  for (const auto& g : gens)
    if (far_from_set(g)) out.add(g);
  for (std::size_t a = 0; a < gens.size(); ++a)
    for (std::size_t b = a + 1; b < gens.size(); ++b) {
      const double ang = angle_between(gens[a], gens[b]);
      if (ang >= std::numbers::pi - 1e-9) continue;
      const int steps = static_cast<int>(std::ceil(ang / opt.angular_res));
      for (int i = 1; i < steps; ++i) {
        const double t = double(i) / steps;
        const Vec3 u = (std::sin((1 - t) * ang) * gens[a] + std::sin(t * ang) * gens[b]).normalized();
        if (far_from_set(u)) out.add(u);
      }
    }
  return out;
}

ConvexBody convex_hull(int dim, std::span<const Point> pts) { return ConvexBody(dim, pts); }

Eigen::Vector2d GraphChart::coord(int i, int j) const {
  const double h = spacing();
  return {-radius + i * h, dim == 3 ? -radius + j * h : 0.0};
}

Point GraphChart::to_world(const Eigen::Vector2d& xp, double t) const {
  if (dim == 2) return base_point + xp.x() * frame.col(0) + t * frame.col(1);
  return base_point + xp.x() * frame.col(0) + xp.y() * frame.col(1) + t * frame.col(2);
}

double envelope_height(const ConvexBody& k, const Point& base, const Eigen::Matrix3d& frame, int dim,
                       const Eigen::Vector2d& xp) {
  const Vec3 axis = frame.col(dim - 1);
  const Point q = dim == 2 ? Point(base + xp.x() * frame.col(0))
                           : Point(base + xp.x() * frame.col(0) + xp.y() * frame.col(1));
  double lo = -kInf, hi = kInf;
  const double tiny = 1e-14;
  for (const auto& f : k.facets()) {
    const double na = f.normal.dot(axis);
    const double slack = f.offset - f.normal.dot(q);
    if (na < -tiny) {
      lo = std::max(lo, slack / na);
    } else if (na > tiny) {
      hi = std::min(hi, slack / na);
    } else if (slack < -1e-12 * k.scale()) {
      return kNaN;
    }
  }
  if (lo > hi + 1e-12 * k.scale() || !std::isfinite(lo)) return kNaN;
  return lo;
}

GraphChart extract_graph_chart(const ConvexBody& k, const Point& x, double theta, const ChartOptions& opt) {
  require(theta >= 0 && theta < std::numbers::pi / 2, "chart angle must lie in [0, pi/2)");
  require(k.full_dimensional(), "graph chart needs a body with interior");
  const BoundaryHit hit = snap_to_boundary(k, x, opt.boundary_tol);
  const double tiny = 1e-10 * k.scale();

  Vec3 normal = Vec3::Zero();
  for (int f : k.facets_near(hit.point, tiny)) normal += k.facets()[f].normal;
  require(normal.norm() > 0, "no supporting normal found");
  normal.normalize();

  const double cos_t = std::cos(theta);
  auto admissible = [&](double r) {
    for (int f : k.facets_near(hit.point, r))
      if (k.facets()[f].normal.dot(normal) < cos_t - 1e-12) return false;
    return true;
  };
  double r = 0.0;
  if (opt.r) {
    if (admissible(*opt.r)) r = *opt.r;
  } else {
    const double d = k.diameter();
    for (int j = 0; j <= 60 && r == 0.0; ++j) {
      const double cand = d * std::pow(2.0, -0.5 * j);
      if (admissible(cand)) r = cand;
    }
  }
  if (r <= 0.0) throw DomainError("no admissible chart radius");

  GraphChart c;
  c.dim = k.dim();
  c.base_point = hit.point;
  c.frame = frame_from_axis(-normal, c.dim);
  c.theta = theta;
  c.r = r;
  c.lipschitz = std::tan(theta);
  c.radius = r / std::sqrt(1.0 + 4.0 * c.lipschitz * c.lipschitz);
  c.samples = std::max(3, opt.samples | 1);
  const int m = c.samples;
  c.values.assign(c.dim == 3 ? std::size_t(m) * m : std::size_t(m), kNaN);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < (c.dim == 3 ? m : 1); ++j) {
      const Eigen::Vector2d xp = c.coord(i, j);
      if (xp.norm() > c.radius * (1 + 1e-12)) continue;
      c.values[c.dim == 3 ? i * m + j : i] = envelope_height(k, c.base_point, c.frame, c.dim, xp);
    }
  }
  return c;
}

bool has_local_geodesic_property(const ConvexBody& k, const Point& x, const LgpOptions& opt) {
  const double btol = opt.boundary_tol < 0 ? 1e-7 * k.scale() : opt.boundary_tol;
  const double sd = k.signed_distance(x);
  if (sd > btol) throw DomainError("point is not in the body");
  if (!k.full_dimensional()) {
    // Interior of a segment or flat polygon still carries a segment.
    if (k.affine_dim() == 0) return false;
  } else if (sd < -btol) {
    return true;
  }
  const Point y = sd >= -btol && k.full_dimensional() ? k.closest_boundary_point(x).point : x;

  // Generators of the tangent cone: directions to the vertices of every
  // facet through y.
  std::vector<Vec3> gens;
  const double tiny = std::max(1e-10 * k.scale(), std::abs(sd) * 2);
  const auto& V = k.vertices();
  auto push_dir = [&](const Point& v) {
    const Vec3 d = v - y;
    if (d.norm() > tiny) gens.push_back(d.normalized());
  };
  if (k.facets().empty()) {
    for (const auto& v : V) push_dir(v);
  } else {
    for (int f : k.facets_near(y, tiny))
      for (int v : k.facets()[f].v)
        if (v >= 0) push_dir(V[v]);
  }

  if (!opt.sample_directions) return !gens.empty() && min_norm_point(gens).point.norm() <= opt.margin;
  std::vector<double> radii = opt.radii;
  if (radii.empty())
    for (int j = 3; j <= 8; ++j) radii.push_back(k.diameter() * std::ldexp(1.0, -j));

  const auto& dirs = sphere_directions(k.dim(), opt.angular_res);
  for (double r : radii) {
    std::vector<Vec3> d_r = gens;
    for (const auto& u : dirs)
      if (k.contains(y + r * u, tiny)) d_r.push_back(u);
    if (d_r.empty()) return false;
    if (min_norm_point(d_r).point.norm() > opt.margin) return false;
  }
  return true;
}

}  // namespace kplateau
