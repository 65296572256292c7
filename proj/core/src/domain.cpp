#include "kplateau/domain.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace kplateau {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

GraphDomain GraphDomain::interval(double a, double b) {
  require(a < b, "interval needs a < b");
  GraphDomain d;
  d.kind_ = Kind::interval;
  d.n_ = 1;
  d.lo_ = Vec2(a, 0.0);
  d.hi_ = Vec2(b, 0.0);
  std::ostringstream s;
  s << "interval [" << a << ", " << b << "]";
  d.description_ = s.str();
  return d;
}

GraphDomain GraphDomain::disk(const Vec2& center, double radius) {
  require(radius > 0, "disk radius must be positive");
  GraphDomain d;
  d.kind_ = Kind::disk;
  d.n_ = 2;
  d.center_ = center;
  d.radius_ = radius;
  d.lo_ = center - Vec2::Constant(radius);
  d.hi_ = center + Vec2::Constant(radius);
  std::ostringstream s;
  s << "disk r=" << radius;
  d.description_ = s.str();
  return d;
}

GraphDomain GraphDomain::polygon(const ConvexBody& body) {
  require(body.valid() && body.dim() == 2 && body.full_dimensional(), "polygon domain needs a planar body with interior");
  GraphDomain d;
  d.kind_ = Kind::polygon;
  d.n_ = 2;
  for (const auto& f : body.facets()) {
    d.normals_.emplace_back(f.normal.x(), f.normal.y());
    d.offsets_.push_back(f.offset);
  }
  d.lo_ = body.lower().head<2>();
  d.hi_ = body.upper().head<2>();
  d.description_ = "polygon with " + std::to_string(body.vertices().size()) + " vertices";
  return d;
}

GraphDomain GraphDomain::implicit(int n, std::function<double(const Vec2&)> level, const Vec2& lo, const Vec2& hi) {
  require(n == 1 || n == 2, "graph dimension must be 1 or 2");
  require(static_cast<bool>(level), "implicit domain needs a level function");
  GraphDomain d;
  d.kind_ = Kind::implicit;
  d.n_ = n;
  d.level_ = std::move(level);
  d.lo_ = lo;
  d.hi_ = hi;
  if (n == 1) d.lo_.y() = d.hi_.y() = 0.0;
  d.description_ = "implicit";
  return d;
}

double GraphDomain::level(const Vec2& x) const {
  switch (kind_) {
    case Kind::interval:
      return std::max(lo_.x() - x.x(), x.x() - hi_.x());
    case Kind::disk:
      return (x - center_).norm() - radius_;
    case Kind::polygon: {
      double m = -kInf;
      for (std::size_t i = 0; i < normals_.size(); ++i) m = std::max(m, normals_[i].dot(x) - offsets_[i]);
      return m;
    }
    case Kind::implicit:
      return level_(x);
  }
  return kInf;
}

double GraphDomain::ray_hit(const Vec2& x, const Vec2& d, double limit) const {
  double t = kInf;
  switch (kind_) {
    case Kind::interval:
      if (d.x() > 0) t = (hi_.x() - x.x()) / d.x();
      else if (d.x() < 0) t = (lo_.x() - x.x()) / d.x();
      break;
    case Kind::disk: {
      const Vec2 p = x - center_;
      const double b = p.dot(d), c = p.squaredNorm() - radius_ * radius_;
      t = -b + std::sqrt(std::max(0.0, b * b - c));
      break;
    }
    case Kind::polygon:
      for (std::size_t i = 0; i < normals_.size(); ++i) {
        const double nd = normals_[i].dot(d);
        if (nd > 0) t = std::min(t, (offsets_[i] - normals_[i].dot(x)) / nd);
      }
      break;
    case Kind::implicit: {
      if (level_(x + limit * d) < 0) return kInf;
      double a = 0.0, b = limit;
      for (int it = 0; it < 80 && b - a > 1e-15 * limit; ++it) {
        const double m = 0.5 * (a + b);
        (level_(x + m * d) < 0 ? a : b) = m;
      }
      t = 0.5 * (a + b);
      break;
    }
  }
  return t <= limit ? std::max(t, 0.0) : kInf;
}

}  // namespace kplateau
