#include "kplateau/spherical.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "kplateau/direction_grid.hpp"
#include "kplateau/min_norm_point.hpp"

namespace kplateau {

namespace {

constexpr double kHemisphereMargin = 1e-9;

// Rotation taking w to the "up" axis (planar rotations stay in the plane).
Eigen::Matrix3d rotation_to_up(const Vec3& w, int dim) {
  if (dim == 2) {
    const double a = std::atan2(w.y(), w.x());
    const double rot = std::numbers::pi / 2 - a;
    Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
    r(0, 0) = std::cos(rot);
    r(0, 1) = -std::sin(rot);
    r(1, 0) = std::sin(rot);
    r(1, 1) = std::cos(rot);
    return r;
  }
  return Eigen::Quaterniond::FromTwoVectors(w, Vec3::UnitZ()).toRotationMatrix();
}

// Great arc samples strictly between a and b at spacing <= res.
void arc_samples(const Vec3& a, const Vec3& b, double res, std::vector<Vec3>& out) {
  const double ang = angle_between(a, b);
  if (ang >= std::numbers::pi - 1e-9) return;
  const int steps = static_cast<int>(std::ceil(ang / res));
  for (int i = 1; i < steps; ++i) {
    const double t = double(i) / steps;
    out.push_back((std::sin((1 - t) * ang) * a + std::sin(t * ang) * b).normalized());
  }
}

void add_if_far(DirectionSet& s, const Vec3& u, double gap) {
  const double c = std::cos(gap);
  for (const auto& v : s.directions)
    if (u.dot(v) >= c) return;
  s.directions.push_back(u.normalized());
}

// Indices of the members of x that are extreme in the projected picture.
std::vector<int> extreme_members(const std::vector<Vec3>& x, const Vec3& witness, int dim) {
  const Eigen::Matrix3d r = rotation_to_up(witness, dim);
  std::vector<Point> proj;
  proj.reserve(x.size());
  for (const auto& u : x) proj.push_back(affine_projection(r * u, dim));
  if (dim == 2) {
    int lo = 0, hi = 0;
    for (int i = 0; i < static_cast<int>(proj.size()); ++i) {
      if (proj[i].x() < proj[lo].x()) lo = i;
      if (proj[i].x() > proj[hi].x()) hi = i;
    }
    return lo == hi ? std::vector<int>{lo} : std::vector<int>{lo, hi};
  }
  return convex_hull_2d(proj, 1e-14).vertices;
}

// Extreme rays of the polar cone {M : <M, g> <= 0} of a pointed cone.
std::vector<Vec3> polar_generators(const std::vector<Vec3>& g, int dim) {
  std::vector<Vec3> cand;
  if (dim == 2) {
    for (const auto& a : g) {
      cand.emplace_back(a.y(), -a.x(), 0.0);
      cand.emplace_back(-a.y(), a.x(), 0.0);
    }
  } else {
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t j = i + 1; j < g.size(); ++j) {
        const Vec3 c = g[i].cross(g[j]);
        if (c.norm() < 1e-12) continue;
        cand.push_back(c.normalized());
        cand.push_back(-c.normalized());
      }
  }
  std::vector<Vec3> out;
  for (const auto& c : cand) {
    bool ok = true;
    for (const auto& a : g) ok = ok && c.dot(a) <= 1e-12;
    if (ok) out.push_back(c);
  }
  return out;
}

}  // namespace

HalfSpace::HalfSpace(const Vec3& n, double t) : normal(n.normalized()), height(t) {
  require(n.norm() > 0, "half-space normal must be nonzero");
}

SphericalSet::SphericalSet(DirectionSet s) : set(std::move(s)) { update_hemisphere(*this); }

void update_hemisphere(SphericalSet& s) {
  s.strictly_in_hemisphere = false;
  s.witness.reset();
  if (s.set.empty()) return;
  const MinNormResult m = min_norm_point(s.set.directions, 1e-15);
  const double len = m.point.norm();
  if (len < kHemisphereMargin) return;
  const Vec3 w = -m.point / len;
  for (const auto& u : s.set.directions)
    if (w.dot(u) >= -kHemisphereMargin) return;
  s.witness = w;
  s.strictly_in_hemisphere = true;
}

Point affine_projection(const Vec3& u, int dim) {
  check_dim(dim);
  const double t = dim == 2 ? u.y() : u.z();
  if (!(t < 0)) throw DomainError("affine projection needs a negative last coordinate");
  if (dim == 2) return Point(-u.x() / t, 0.0, 0.0);
  return Point(-u.x() / t, -u.y() / t, 0.0);
}

Vec3 affine_lift(const Point& y, int dim) {
  check_dim(dim);
  if (dim == 2) return Vec3(y.x(), -1.0, 0.0) / std::sqrt(1.0 + y.x() * y.x());
  return Vec3(y.x(), y.y(), -1.0) / std::sqrt(1.0 + y.x() * y.x() + y.y() * y.y());
}

SphericalSet dual_set(const SphericalSet& x, const DualOptions& opt) {
  require(!x.empty(), "dual of an empty set");
  const int dim = x.set.dim;
  const double margin = std::isnan(opt.margin) ? std::sin(opt.angular_res) : opt.margin;
  const auto& grid = sphere_directions(dim, opt.angular_res);
  DirectionSet out(dim, DirectionKind::dual);
  for (const auto& m : grid) {
    bool ok = true;
    for (const auto& n : x.directions()) {
      if (n.dot(m) >= -margin) {
        ok = false;
        break;
      }
    }
    if (ok) out.directions.push_back(m);
  }
  if (opt.fill_boundary && x.strictly_in_hemisphere) {
    std::vector<Vec3> ext;
    for (int i : extreme_members(x.directions(), *x.witness, dim)) ext.push_back(x.directions()[i]);
    const auto gens = polar_generators(ext, dim);
    const double gap = 0.5 * grid_spacing(dim, opt.angular_res) * (1 + 1e-6);
    std::vector<Vec3> fill = gens;
    for (std::size_t a = 0; a < gens.size(); ++a)
      for (std::size_t b = a + 1; b < gens.size(); ++b) arc_samples(gens[a], gens[b], opt.angular_res, fill);
    for (const auto& u : fill) add_if_far(out, u, gap);
  }
  return SphericalSet(std::move(out));
}

SphericalSet spherical_convex_hull(const SphericalSet& xin, double angular_res) {
  SphericalSet x = xin;
  if (!x.witness) update_hemisphere(x);
  if (!x.strictly_in_hemisphere) throw DomainError("hull undefined: antipodal obstruction");
  const int dim = x.set.dim;
  const Eigen::Matrix3d r = rotation_to_up(*x.witness, dim);

  std::vector<Point> proj;
  for (const auto& u : x.directions()) proj.push_back(affine_projection(r * u, dim));
  DirectionSet out(dim, x.set.kind);
  std::set<std::array<long long, 3>> seen;
  auto put = [&](const Vec3& u) {
    const Vec3 v = u.normalized();
    const std::array<long long, 3> key{std::llround(v.x() * 1e9), std::llround(v.y() * 1e9), std::llround(v.z() * 1e9)};
    if (seen.insert(key).second) out.directions.push_back(v);
  };
  for (const auto& u : x.directions()) put(u);

  // Boundary: extreme directions and great arcs between consecutive ones.
  std::vector<int> ext = extreme_members(x.directions(), *x.witness, dim);
  std::vector<Vec3> arcs;
  if (ext.size() == 2 || dim == 2) {
    if (ext.size() == 2) arc_samples(x.directions()[ext[0]], x.directions()[ext[1]], angular_res, arcs);
  } else {
    for (std::size_t i = 0; i < ext.size(); ++i)
      arc_samples(x.directions()[ext[i]], x.directions()[ext[(i + 1) % ext.size()]], angular_res, arcs);
  }
  for (const auto& u : arcs) put(u);

  // Interior: grid directions whose projection lies in the Euclidean hull.
  const auto& grid = sphere_directions(dim, angular_res);
  if (dim == 2) {
    double lo = proj[0].x(), hi = proj[0].x();
    for (const auto& p : proj) lo = std::min(lo, p.x()), hi = std::max(hi, p.x());
    for (const auto& g : grid) {
      const Vec3 rg = r * g;
      if (rg.y() >= 0) continue;
      const double y = affine_projection(rg, 2).x();
      if (y > lo && y < hi) put(g);
    }
  } else if (ext.size() >= 3) {
    const ConvexBody poly(2, proj);
    for (const auto& g : grid) {
      const Vec3 rg = r * g;
      if (rg.z() >= 0) continue;
      if (poly.signed_distance(affine_projection(rg, 3)) < 0) put(g);
    }
  }
  return SphericalSet(std::move(out));
}

SphericalSet link(const ConvexBody& k, const Point& x, const LinkOptions& opt) {
  require(k.full_dimensional(), "link needs a body with nonempty interior");
  const double btol = opt.boundary_tol < 0 ? 1e-7 * k.scale() : opt.boundary_tol;
  const double sd = k.signed_distance(x);
  require(std::abs(sd) <= btol, "link base point is not on the boundary");
  const Point y = k.closest_boundary_point(x).point;
  std::vector<double> radii = opt.radii;
  if (radii.empty())
    for (int j = 3; j <= 8; ++j) radii.push_back(k.diameter() * std::ldexp(1.0, -j));
  const auto& grid = sphere_directions(k.dim(), opt.angular_res);
  const double tiny = 1e-12 * k.scale();
  DirectionSet out(k.dim(), DirectionKind::link);
  for (const auto& u : grid) {
    for (double r : radii) {
      if (k.signed_distance(y + r * u) < -tiny) {
        out.directions.push_back(u);
        break;
      }
    }
  }
  return SphericalSet(std::move(out));
}

SphericalSet normals_of_intersection(const ConvexBody& k1, const ConvexBody& k2, const Point& x,
                                     const IntersectionOptions& opt) {
  require(k1.dim() == k2.dim(), "bodies of different dimension");
  const double s1 = k1.signed_distance(x), s2 = k2.signed_distance(x);
  if (s1 > opt.h || s2 > opt.h || (s1 < -opt.h && s2 < -opt.h))
    throw DomainError("point is not on the boundary of the intersection");
  NormalOptions no;
  no.angular_res = opt.angular_res;
  no.boundary_tol = opt.h;
  if (s2 < -opt.h) return SphericalSet(supporting_normals(k1, x, no));
  if (s1 < -opt.h) return SphericalSet(supporting_normals(k2, x, no));
  DirectionSet both = supporting_normals(k1, x, no);
  for (const auto& u : supporting_normals(k2, x, no).directions) both.add(u);
  SphericalSet hull = spherical_convex_hull(SphericalSet(std::move(both)), opt.angular_res);
  hull.set.kind = DirectionKind::supporting_normals;
  return hull;
}

double spherical_set_distance(const SphericalSet& a, const SphericalSet& b) {
  return angular_hausdorff(a.set, b.set);
}

}  // namespace kplateau
