#include "kplateau/convex_body.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <set>

#include "kplateau/direction_grid.hpp"

namespace kplateau {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Ericson, Real-Time Collision Detection, 5.1.5.
Point closest_on_triangle(const Point& p, const Point& a, const Point& b, const Point& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return a;
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + ab * (d1 / (d1 - d3));
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + ac * (d2 / (d2 - d6));
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

Point closest_on_segment(const Point& p, const Point& a, const Point& b) {
  const Vec3 d = b - a;
  const double len2 = d.squaredNorm();
  if (len2 == 0) return a;
  return a + std::clamp((p - a).dot(d) / len2, 0.0, 1.0) * d;
}

struct Bvh {
  struct Node {
    Eigen::AlignedBox3d box;
    int left = -1, right = -1, first = 0, count = 0;
  };
  std::vector<Node> nodes;
  std::vector<int> prims;

  void build(const std::vector<Eigen::AlignedBox3d>& boxes) {
    prims.resize(boxes.size());
    std::iota(prims.begin(), prims.end(), 0);
    nodes.clear();
    if (boxes.empty()) return;
    nodes.reserve(2 * boxes.size());
    build_node(boxes, 0, static_cast<int>(boxes.size()));
  }

  int build_node(const std::vector<Eigen::AlignedBox3d>& boxes, int first, int count) {
    const int id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    Eigen::AlignedBox3d box;
    for (int i = first; i < first + count; ++i) box.extend(boxes[prims[i]]);
    nodes[id].box = box;
    if (count <= 4) {
      nodes[id].first = first;
      nodes[id].count = count;
      return id;
    }
    int axis;
    box.sizes().maxCoeff(&axis);
    const int mid = first + count / 2;
    std::nth_element(prims.begin() + first, prims.begin() + mid, prims.begin() + first + count, [&](int a, int b) {
      return boxes[a].center()[axis] < boxes[b].center()[axis];
    });
    const int l = build_node(boxes, first, mid - first);
    const int r = build_node(boxes, mid, first + count - mid);
    nodes[id].left = l;
    nodes[id].right = r;
    return id;
  }

  // Calls visit(prim) for primitives whose box is within `radius()` of x,
  // where radius() may shrink as the search proceeds.
  template <class Visit, class Radius>
  void query(const Point& x, Visit&& visit, Radius&& radius) const {
    if (nodes.empty()) return;
    int stack[128];
    int top = 0;
    stack[top++] = 0;
    while (top) {
      const Node& n = nodes[stack[--top]];
      if (n.box.exteriorDistance(x) > radius()) continue;
      if (n.left < 0) {
        for (int i = n.first; i < n.first + n.count; ++i) visit(prims[i]);
        continue;
      }
      const double dl = nodes[n.left].box.exteriorDistance(x);
      const double dr = nodes[n.right].box.exteriorDistance(x);
      if (dl < dr) {
        stack[top++] = n.right;
        stack[top++] = n.left;
      } else {
        stack[top++] = n.left;
        stack[top++] = n.right;
      }
    }
  }
};

}  // namespace

struct ConvexBody::Impl {
  int dim = 2;
  HullResult hull;
  std::vector<Point> vertices;
  std::vector<std::vector<int>> adjacency;
  Bvh bvh;
  double volume = 0.0;
  Point centroid = Point::Zero();
  Vec3 lo, hi;
  double scale = 1.0;

  mutable std::mutex mutex;
  mutable std::map<double, std::vector<double>> support_cache;
  mutable std::map<std::pair<double, double>, std::unique_ptr<GridField>> sdf_cache;
  mutable double diameter = -1.0;

  Point facet_closest(int f, const Point& x) const {
    const Facet& fc = hull.facets[f];
    if (fc.v[2] < 0) return closest_on_segment(x, vertices[fc.v[0]], vertices[fc.v[1]]);
    return closest_on_triangle(x, vertices[fc.v[0]], vertices[fc.v[1]], vertices[fc.v[2]]);
  }
};

ConvexBody::ConvexBody(int dim, std::span<const Point> points, double rel_eps) {
  check_dim(dim);
  require(!points.empty(), "convex body needs at least one point");
  auto impl = std::make_shared<Impl>();
  impl->dim = dim;
  std::vector<Point> pts(points.begin(), points.end());
  if (dim == 2)
    for (auto& p : pts) p.z() = 0.0;
  Vec3 lo = pts[0], hi = pts[0];
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double extent = std::max((hi - lo).norm(), 1e-300);
  impl->scale = std::max(extent, std::max(lo.cwiseAbs().maxCoeff(), hi.cwiseAbs().maxCoeff()));
  const double eps = rel_eps * impl->scale;
  HullResult h = dim == 2 ? convex_hull_2d(pts, eps) : convex_hull_3d(pts, eps);

  // Remap to a compact vertex array.
  std::vector<int> remap(pts.size(), -1);
  for (int v : h.vertices) {
    remap[v] = static_cast<int>(impl->vertices.size());
    impl->vertices.push_back(pts[v]);
  }
  for (auto& f : h.facets)
    for (int& v : f.v)
      if (v >= 0) v = remap[v];
  for (int& v : h.vertices) v = remap[v];
  impl->hull = std::move(h);

  const auto& V = impl->vertices;
  impl->lo = V[0];
  impl->hi = V[0];
  for (const auto& p : V) {
    impl->lo = impl->lo.cwiseMin(p);
    impl->hi = impl->hi.cwiseMax(p);
  }

  // adjacency
  std::vector<std::set<int>> adj(V.size());
  if (impl->hull.affine_dim == 1 && V.size() == 2) {
    adj[0].insert(1);
    adj[1].insert(0);
  }
  for (const auto& f : impl->hull.facets) {
    const int m = f.v[2] < 0 ? 2 : 3;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        if (i != j) adj[f.v[i]].insert(f.v[j]);
  }
  impl->adjacency.resize(V.size());
  for (std::size_t i = 0; i < V.size(); ++i) impl->adjacency[i].assign(adj[i].begin(), adj[i].end());

  // volume and centroid
  Point mean = Point::Zero();
  for (const auto& p : V) mean += p;
  mean /= double(V.size());
  impl->centroid = mean;
  if (impl->hull.affine_dim == dim) {
    double vol = 0.0;
    Point c = Point::Zero();
    for (const auto& f : impl->hull.facets) {
      if (dim == 2) {
        const Vec3 a = V[f.v[0]] - mean, b = V[f.v[1]] - mean;
        const double w = 0.5 * (a.x() * b.y() - a.y() * b.x());
        vol += w;
        c += w * (mean + (a + b) / 3.0);
      } else {
        const Vec3 a = V[f.v[0]] - mean, b = V[f.v[1]] - mean, d = V[f.v[2]] - mean;
        const double w = a.dot(b.cross(d)) / 6.0;
        vol += w;
        c += w * (mean + (a + b + d) / 4.0);
      }
    }
    impl->volume = std::abs(vol);
    if (vol != 0.0) impl->centroid = c / vol;
  }

  std::vector<Eigen::AlignedBox3d> boxes;
  boxes.reserve(impl->hull.facets.size());
  for (const auto& f : impl->hull.facets) {
    Eigen::AlignedBox3d b;
    for (int v : f.v)
      if (v >= 0) b.extend(V[v]);
    boxes.push_back(b);
  }
  impl->bvh.build(boxes);
  impl_ = std::move(impl);
}

const ConvexBody::Impl& ConvexBody::self() const {
  require(valid(), "operation on an empty convex body");
  return *impl_;
}

int ConvexBody::dim() const { return self().dim; }
int ConvexBody::affine_dim() const { return self().hull.affine_dim; }
const std::vector<Point>& ConvexBody::vertices() const { return self().vertices; }
const std::vector<Facet>& ConvexBody::facets() const { return self().hull.facets; }
const std::vector<std::vector<int>>& ConvexBody::neighbours() const { return self().adjacency; }
double ConvexBody::volume() const { return self().volume; }
Point ConvexBody::centroid() const { return self().centroid; }
Vec3 ConvexBody::lower() const { return self().lo; }
Vec3 ConvexBody::upper() const { return self().hi; }
double ConvexBody::scale() const { return self().scale; }

int ConvexBody::support_vertex(const Vec3& u, int hint) const {
  const Impl& s = self();
  int cur = std::clamp(hint, 0, static_cast<int>(s.vertices.size()) - 1);
  double best = s.vertices[cur].dot(u);
  // Hill climbing on the edge graph reaches the global maximum of a linear
  // function on a polytope.
  for (bool moved = true; moved;) {
    moved = false;
    for (int nb : s.adjacency[cur]) {
      const double v = s.vertices[nb].dot(u);
      if (v > best) {
        best = v;
        cur = nb;
        moved = true;
      }
    }
  }
  return cur;
}

double ConvexBody::support(const Vec3& u) const {
  const Impl& s = self();
  if (s.adjacency.empty() || s.vertices.size() < 8) {
    double best = -kInf;
    for (const auto& v : s.vertices) best = std::max(best, v.dot(u));
    return best;
  }
  return s.vertices[support_vertex(u, 0)].dot(u);
}

const std::vector<double>& ConvexBody::support_samples(double angular_res) const {
  const Impl& s = self();
  std::lock_guard lock(s.mutex);
  auto it = s.support_cache.find(angular_res);
  if (it != s.support_cache.end()) return it->second;
  const auto& dirs = sphere_directions(s.dim, angular_res);
  std::vector<double> vals(dirs.size());
  int hint = 0;
  const bool small = s.vertices.size() < 8;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    if (small) {
      double best = -kInf;
      for (const auto& v : s.vertices) best = std::max(best, v.dot(dirs[i]));
      vals[i] = best;
    } else {
      hint = support_vertex(dirs[i], hint);
      vals[i] = s.vertices[hint].dot(dirs[i]);
    }
  }
  return s.support_cache.emplace(angular_res, std::move(vals)).first->second;
}

BoundaryHit ConvexBody::closest_boundary_point(const Point& x) const {
  const Impl& s = self();
  BoundaryHit hit;
  hit.distance = kInf;
  if (s.hull.facets.empty()) {
    // point or bare segment (3D collinear input)
    if (s.vertices.size() == 1) return {(x - s.vertices[0]).norm(), s.vertices[0], -1};
    const Point y = closest_on_segment(x, s.vertices[0], s.vertices[1]);
    return {(x - y).norm(), y, -1};
  }
  s.bvh.query(
      x,
      [&](int f) {
        const Point y = s.facet_closest(f, x);
        const double d = (x - y).norm();
        if (d < hit.distance) {
          hit.distance = d;
          hit.point = y;
          hit.facet = f;
        }
      },
      [&] { return hit.distance; });
  return hit;
}

std::vector<int> ConvexBody::facets_near(const Point& x, double radius) const {
  const Impl& s = self();
  std::vector<int> out;
  s.bvh.query(
      x,
      [&](int f) {
        if ((x - s.facet_closest(f, x)).norm() <= radius) out.push_back(f);
      },
      [&] { return radius; });
  std::sort(out.begin(), out.end());
  return out;
}

double ConvexBody::signed_distance(const Point& x) const {
  const Impl& s = self();
  const BoundaryHit hit = closest_boundary_point(x);
  if (s.hull.affine_dim < s.dim) return hit.distance;
  const double tiny = 1e-14 * s.scale;
  if (hit.distance <= tiny) return hit.distance;
  // Outside iff some facet attaining the minimum separates x.
  for (int f : facets_near(x, hit.distance * (1 + 1e-9) + tiny)) {
    const Facet& fc = s.hull.facets[f];
    if (fc.normal.dot(x) - fc.offset > 0) return hit.distance;
  }
  return -hit.distance;
}

Projection ConvexBody::project(const Point& x) const {
  const double sd = signed_distance(x);
  if (sd <= 0) return {0.0, x};
  const BoundaryHit hit = closest_boundary_point(x);
  return {hit.distance, hit.point};
}

double ConvexBody::diameter() const {
  const Impl& s = self();
  std::lock_guard lock(s.mutex);
  if (s.diameter < 0) {
    double d2 = 0;
    for (std::size_t i = 0; i < s.vertices.size(); ++i)
      for (std::size_t j = i + 1; j < s.vertices.size(); ++j)
        d2 = std::max(d2, (s.vertices[i] - s.vertices[j]).squaredNorm());
    s.diameter = std::sqrt(d2);
  }
  return s.diameter;
}

const GridField& ConvexBody::sdf(double h, double margin) const {
  const Impl& s = self();
  std::lock_guard lock(s.mutex);
  auto key = std::make_pair(h, margin);
  auto it = s.sdf_cache.find(key);
  if (it != s.sdf_cache.end()) return *it->second;
  auto field = std::make_unique<GridField>(make_grid(s.dim, s.lo, s.hi, h, margin));
  const auto& g = field->spec;
  for (int i = 0; i < g.shape[0]; ++i)
    for (int j = 0; j < g.shape[1]; ++j)
      for (int k = 0; k < g.shape[2]; ++k) field->at(i, j, k) = signed_distance(g.node(i, j, k));
  return *s.sdf_cache.emplace(key, std::move(field)).first->second;
}

}  // namespace kplateau
