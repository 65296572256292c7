#include "kplateau/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "kplateau/direction_grid.hpp"

namespace kplateau {

namespace {

// Integral of the unnormalized profile over the unit ball of R^dim.
double profile_mass(int dim) {
  const int n = 20000;
  auto g = [&](double r) {
    const double p = Mollifier::profile(r);
    return dim == 2 ? 2 * std::numbers::pi * r * p : 4 * std::numbers::pi * r * r * p;
  };
  double sum = g(0) + g(1);
  for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * g(double(i) / n);
  return sum / (3.0 * n);
}

// Orthonormal basis of the tangent space N-perp (columns).
Eigen::MatrixXd tangent_basis(const Vec3& N, int dim) {
  if (dim == 2) {
    Eigen::MatrixXd t(3, 1);
    t.col(0) = Vec3(-N.y(), N.x(), 0.0);
    return t;
  }
  const Vec3 a = std::abs(N.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 t1 = N.cross(a).normalized();
  Eigen::MatrixXd t(3, 2);
  t.col(0) = t1;
  t.col(1) = N.cross(t1);
  return t;
}

// Parametric interval of the segment p + t (q - p), t in [0, 1], inside b.
bool clip_segment(const ConvexBody& b, const Point& p, const Point& q, double& t0, double& t1) {
  const Vec3 d = q - p;
  t0 = 0.0;
  t1 = 1.0;
  const double tiny = 1e-15 * b.scale();
  for (const auto& f : b.facets()) {
    const double den = f.normal.dot(d);
    const double num = f.offset - f.normal.dot(p);
    if (std::abs(den) <= tiny) {
      if (num < -tiny) return false;
      continue;
    }
    if (den > 0) t1 = std::min(t1, num / den);
    else t0 = std::max(t0, num / den);
    if (t0 > t1) return false;
  }
  return true;
}

void clipped_edges(const ConvexBody& a, const ConvexBody& b, std::vector<Point>& out) {
  const Vec3 lo = b.lower(), hi = b.upper();
  const auto& v = a.vertices();
  const auto& nb = a.neighbours();
  for (int i = 0; i < static_cast<int>(v.size()); ++i) {
    for (int j : nb[i]) {
      if (j < i) continue;
      const Vec3 smin = v[i].cwiseMin(v[j]), smax = v[i].cwiseMax(v[j]);
      if ((smax.array() < lo.array()).any() || (smin.array() > hi.array()).any()) continue;
      double t0, t1;
      if (!clip_segment(b, v[i], v[j], t0, t1)) continue;
      out.push_back(v[i] + t0 * (v[j] - v[i]));
      out.push_back(v[i] + t1 * (v[j] - v[i]));
    }
  }
}

}  // namespace

Mollifier::Mollifier(int dim, double scale) : dim_(dim), scale_(scale) {
  check_dim(dim);
  require(scale > 0, "mollifier scale must be positive");
  norm_ = 1.0 / profile_mass(dim);
}

double Mollifier::profile(double r) {
  if (r >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - r * r));
}

double Mollifier::operator()(const Vec3& y) const {
  const Vec3 yy = dim_ == 2 ? Vec3(y.x(), y.y(), 0.0) : y;
  return norm_ * profile(yy.norm() / scale_) / std::pow(scale_, dim_);
}

GridField mollify(const GridField& field, const Mollifier& m) {
  const GridSpec& g = field.spec;
  require(g.dim == m.dim(), "mollifier and grid dimensions differ");
  if (m.scale() < 2 * g.spacing) throw DomainError("kernel under-resolved");
  struct Tap {
    int di, dj, dk;
    double w;
  };
  const int reach = static_cast<int>(std::ceil(m.scale() / g.spacing));
  const int kreach = g.dim == 3 ? reach : 0;
  std::vector<Tap> taps;
  double total = 0.0;
  for (int di = -reach; di <= reach; ++di)
    for (int dj = -reach; dj <= reach; ++dj)
      for (int dk = -kreach; dk <= kreach; ++dk) {
        const double w = m(g.spacing * Vec3(di, dj, dk));
        if (w <= 0) continue;
        taps.push_back({di, dj, dk, w});
        total += w;
      }
  for (auto& t : taps) t.w /= total;

  GridField out(g, std::numeric_limits<double>::quiet_NaN());
  for (int i = 0; i < g.shape[0]; ++i)
    for (int j = 0; j < g.shape[1]; ++j)
      for (int k = 0; k < g.shape[2]; ++k) {
        double sum = 0.0, wsum = 0.0;
        for (const auto& t : taps) {
          const int a = i + t.di, b = j + t.dj, c = k + t.dk;
          if (!g.inside(a, b, c)) continue;
          const double v = field.at(a, b, c);
          if (std::isnan(v)) continue;
          sum += t.w * v;
          wsum += t.w;
        }
        if (wsum > 0) out.at(i, j, k) = sum / wsum;
      }
  return out;
}

LevelSetCurvature level_set_curvature(const SpaceField& field, int dim, double level, const Point& x0, double h) {
  check_dim(dim);
  require(h > 0, "difference step must be positive");
  const Vec3 e[3] = {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
  auto grad = [&](const Point& x) {
    Vec3 g = Vec3::Zero();
    for (int a = 0; a < dim; ++a) g[a] = (field(x + h * e[a]) - field(x - h * e[a])) / (2 * h);
    return g;
  };
  auto critical = [] { throw DomainError("critical point: level set not a graph here"); };

  Point x = x0;
  if (dim == 2) x.z() = 0.0;
  for (int it = 0; it < 50; ++it) {
    const double v = field(x) - level;
    if (std::abs(v) <= 1e-13 * (1.0 + std::abs(level))) break;
    const Vec3 g = grad(x);
    if (g.norm() <= 1e-8) critical();
    x -= v * g / g.squaredNorm();
  }
  const Vec3 g = grad(x);
  const double gn = g.norm();
  if (gn <= 1e-8) critical();

  Eigen::Matrix3d H = Eigen::Matrix3d::Zero();
  const double f0 = field(x);
  for (int a = 0; a < dim; ++a) {
    H(a, a) = (field(x + h * e[a]) - 2 * f0 + field(x - h * e[a])) / (h * h);
    for (int b = a + 1; b < dim; ++b) {
      const double v = (field(x + h * (e[a] + e[b])) - field(x + h * (e[a] - e[b])) - field(x - h * (e[a] - e[b])) +
                        field(x - h * (e[a] + e[b]))) /
                       (4 * h * h);
      H(a, b) = H(b, a) = v;
    }
  }

  LevelSetCurvature out;
  out.point = x;
  out.normal = g / gn;
  const Eigen::MatrixXd T = tangent_basis(out.normal, dim);
  const Eigen::MatrixXd A = T.transpose() * H * T / gn;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  out.gauss = 1.0;
  for (int i = 0; i < A.rows(); ++i) {
    out.shape.push_back(es.eigenvalues()(i));
    out.gauss *= es.eigenvalues()(i);
  }
  return out;
}

LevelSetCurvature level_set_curvature(const GridField& field, double level, const Point& x) {
  return level_set_curvature([&](const Point& p) { return field.sample(p); }, field.spec.dim, level, x,
                             field.spec.spacing);
}

double target_gauss_curvature(int dim, double k) {
  check_dim(dim);
  require(k > 0, "curvature must be positive");
  return dim == 2 ? std::sqrt(k) : k;
}

bool CurvatureMatrixSet::contains(const Eigen::Matrix3d& a, double tol) const {
  check_dim(dim);
  const Eigen::MatrixXd m = a.topLeftCorner(dim, dim);
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol) return false;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol) return false;
  if (es.eigenvalues().cwiseAbs().maxCoeff() > B + tol) return false;
  Vec3 n = N;
  if (dim == 2) n.z() = 0.0;
  const Eigen::MatrixXd T = tangent_basis(n.normalized(), dim).topRows(dim);
  const double det = (T.transpose() * m * T).determinant();
  return det >= std::pow(k, dim - 1) - tol;
}

ConvexBody intersect(const ConvexBody& a, const ConvexBody& b) {
  require(a.valid() && b.valid(), "invalid body");
  require(a.dim() == b.dim(), "bodies of different dimension");
  require(a.full_dimensional() && b.full_dimensional(), "intersection needs full-dimensional bodies");
  std::vector<Point> pts;
  clipped_edges(a, b, pts);
  clipped_edges(b, a, pts);
  if (pts.empty()) throw DomainError("empty intersection");
  return ConvexBody(a.dim(), pts);
}

SmoothedBody smooth_intersection(const ConvexBody& k1, const ConvexBody& k2, double k, double eps,
                                 const SmoothingOptions& opts) {
  require(eps > 0, "epsilon must be positive");
  require(opts.iteration >= 1, "iteration index starts at 1");
  ConvexBody inter;
  try {
    inter = intersect(k1, k2);
  } catch (const DomainError&) {
    throw DomainError("empty or degenerate intersection");
  }
  if (!inter.full_dimensional()) throw DomainError("empty or degenerate intersection");
  const int dim = inter.dim();
  const double kt = target_gauss_curvature(dim, k);
  require(eps < kt, "epsilon must be smaller than the curvature bound");

  // Offsetting a surface with principal curvatures >= c by r keeps its Gauss
  // curvature >= kt - eps as long as r <= r_max.
  const int n = dim - 1;
  const double c = std::pow(kt, 1.0 / n);
  const double r_max = (std::pow(kt / (kt - eps), 1.0 / n) - 1.0) / c;
  const double depth = -inter.signed_distance(inter.centroid());

  SmoothedBody out;
  out.window = std::min(depth, 2 * r_max);
  out.r = opts.r.value_or(std::min(out.window / 4, 2.0 / (3.0 * opts.iteration)));
  out.s = opts.s.value_or(out.r / 8);
  out.h = opts.h.value_or(out.s / 2);
  if (!(out.r > 0 && out.s > 0 && out.h > 0 && out.s < out.r && out.s >= 2 * out.h))
    throw DomainError("smoothing window not found");
  const double margin = out.r + out.s + 4 * out.h;
  const GridSpec spec = make_grid(dim, inter.lower(), inter.upper(), out.h, margin);
  if (spec.size() > opts.max_nodes) throw DomainError("smoothing window not found");

  GridField d = inter.sdf(out.h, margin);
  for (auto& v : d.values) v = std::max(v, 0.0);
  const GridField ds = mollify(d, Mollifier(dim, out.s));

  const double res = opts.angular_res.value_or(dim == 2 ? std::numbers::pi / 720 : std::numbers::pi / 90);
  const Point c0 = inter.centroid();
  const double reach = inter.diameter() + margin;
  for (const auto& u : sphere_directions(dim, res)) {
    double lo = 0.0, hi = reach;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (ds.sample(c0 + mid * u) < out.r ? lo : hi) = mid;
    }
    out.samples.push_back(c0 + 0.5 * (lo + hi) * u);
  }
  out.min_curvature = std::numeric_limits<double>::infinity();
  for (const auto& p : out.samples)
    out.min_curvature = std::min(out.min_curvature, level_set_curvature(ds, out.r, p).gauss);
  out.body = ConvexBody(dim, out.samples);
  return out;
}

double volume(const ConvexBody& k) {
  require(k.valid(), "invalid body");
  return k.volume();
}

}  // namespace kplateau
