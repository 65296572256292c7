#include "kplateau/hull.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace kplateau {

namespace {

double cross2(const Point& o, const Point& a, const Point& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

Facet edge_facet(std::span<const Point> pts, int a, int b) {
  Facet f;
  f.v = {a, b, -1};
  const Vec3 d = pts[b] - pts[a];
  f.normal = Vec3(d.y(), -d.x(), 0.0).normalized();
  f.offset = f.normal.dot(pts[a]);
  return f;
}

}  // namespace

HullResult convex_hull_2d(std::span<const Point> pts, double eps) {
  require(!pts.empty(), "convex hull of an empty point set");
  std::vector<int> idx(pts.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return pts[a].x() < pts[b].x() || (pts[a].x() == pts[b].x() && pts[a].y() < pts[b].y());
  });
  // drop exact duplicates
  idx.erase(std::unique(idx.begin(), idx.end(), [&](int a, int b) { return (pts[a] - pts[b]).norm() <= eps; }),
            idx.end());

  HullResult out;
  if (idx.size() == 1) {
    out.affine_dim = 0;
    out.vertices = idx;
    return out;
  }
  std::vector<int> h(2 * idx.size());
  std::size_t k = 0;
  for (int i : idx) {
    while (k >= 2 && cross2(pts[h[k - 2]], pts[h[k - 1]], pts[i]) <= eps * (pts[h[k - 1]] - pts[h[k - 2]]).norm()) --k;
    h[k++] = i;
  }
  for (std::size_t t = idx.size() - 1, lo = k + 1; t-- > 0;) {
    const int i = idx[t];
    while (k >= lo && cross2(pts[h[k - 2]], pts[h[k - 1]], pts[i]) <= eps * (pts[h[k - 1]] - pts[h[k - 2]]).norm()) --k;
    h[k++] = i;
  }
  h.resize(k - 1);
  if (h.size() <= 2) {
    // collinear: keep the two extremes
    out.affine_dim = 1;
    out.vertices = {idx.front(), idx.back()};
    out.facets = {edge_facet(pts, idx.front(), idx.back()), edge_facet(pts, idx.back(), idx.front())};
    return out;
  }
  out.affine_dim = 2;
  out.vertices = h;
  for (std::size_t i = 0; i < h.size(); ++i) out.facets.push_back(edge_facet(pts, h[i], h[(i + 1) % h.size()]));
  return out;
}

namespace {

struct Face {
  std::array<int, 3> v;
  std::array<int, 3> nbr{-1, -1, -1};  // neighbour across edge (v[i], v[i+1])
  Vec3 n;
  double d = 0;
  std::vector<int> outside;
  bool alive = true;
  int visit = -1;
};

class QuickHull {
 public:
  QuickHull(std::span<const Point> pts, double eps) : pts_(pts), eps_(eps) {}

  HullResult run();

 private:
  double dist(const Face& f, int p) const { return f.n.dot(pts_[p]) - f.d; }
  int make_face(int a, int b, int c);
  void link(int f, int e, int g, int ge) {
    faces_[f].nbr[e] = g;
    faces_[g].nbr[ge] = f;
  }
  int edge_index(const Face& f, int a, int b) const {
    for (int i = 0; i < 3; ++i)
      if (f.v[i] == a && f.v[(i + 1) % 3] == b) return i;
    return -1;
  }
  HullResult planar_fallback(const Vec3& normal);

  std::span<const Point> pts_;
  double eps_;
  std::vector<Face> faces_;
  Vec3 interior_ = Vec3::Zero();
};

int QuickHull::make_face(int a, int b, int c) {
  Face f;
  f.v = {a, b, c};
  f.n = (pts_[b] - pts_[a]).cross(pts_[c] - pts_[a]);
  const double len = f.n.norm();
  f.n = len > 0 ? Vec3(f.n / len) : Vec3::UnitZ();
  f.d = f.n.dot(pts_[a]);
  faces_.push_back(std::move(f));
  return static_cast<int>(faces_.size()) - 1;
}

HullResult QuickHull::planar_fallback(const Vec3& normal) {
  // Project onto the plane, take the 2D hull and emit a two-sided fan.
  Vec3 e1 = normal.unitOrthogonal();
  Vec3 e2 = normal.cross(e1);
  std::vector<Point> flat(pts_.size());
  for (std::size_t i = 0; i < pts_.size(); ++i) flat[i] = Point(e1.dot(pts_[i]), e2.dot(pts_[i]), 0.0);
  HullResult h2 = convex_hull_2d(flat, eps_);
  HullResult out;
  out.affine_dim = h2.affine_dim;
  out.vertices = h2.vertices;
  if (h2.affine_dim == 2) {
    const auto& v = h2.vertices;
    const double off = normal.dot(pts_[v[0]]);
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      out.facets.push_back({{v[0], v[i], v[i + 1]}, normal, off});
      out.facets.push_back({{v[0], v[i + 1], v[i]}, -normal, -off});
    }
  }
  return out;
}

HullResult QuickHull::run() {
  const int n = static_cast<int>(pts_.size());
  // initial simplex
  int i0 = 0, i1 = 0;
  for (int i = 0; i < n; ++i) {
    if (pts_[i].x() < pts_[i0].x()) i0 = i;
    if (pts_[i].x() > pts_[i1].x()) i1 = i;
  }
  if ((pts_[i1] - pts_[i0]).norm() <= eps_) {
    for (int i = 0; i < n; ++i)
      if ((pts_[i] - pts_[i0]).norm() > (pts_[i1] - pts_[i0]).norm()) i1 = i;
  }
  HullResult out;
  if ((pts_[i1] - pts_[i0]).norm() <= eps_) {
    out.affine_dim = 0;
    out.vertices = {i0};
    return out;
  }
  const Vec3 axis = (pts_[i1] - pts_[i0]).normalized();
  int i2 = -1;
  double best = eps_;
  for (int i = 0; i < n; ++i) {
    const Vec3 d = pts_[i] - pts_[i0];
    const double off = (d - d.dot(axis) * axis).norm();
    if (off > best) best = off, i2 = i;
  }
  if (i2 < 0) {
    // collinear: extremes along the axis
    int lo = i0, hi = i0;
    for (int i = 0; i < n; ++i) {
      if (pts_[i].dot(axis) < pts_[lo].dot(axis)) lo = i;
      if (pts_[i].dot(axis) > pts_[hi].dot(axis)) hi = i;
    }
    out.affine_dim = 1;
    out.vertices = {lo, hi};
    return out;
  }
  const Vec3 pn = (pts_[i1] - pts_[i0]).cross(pts_[i2] - pts_[i0]).normalized();
  int i3 = -1;
  best = eps_;
  for (int i = 0; i < n; ++i) {
    const double off = std::abs(pn.dot(pts_[i] - pts_[i0]));
    if (off > best) best = off, i3 = i;
  }
  if (i3 < 0) return planar_fallback(pn);

  interior_ = (pts_[i0] + pts_[i1] + pts_[i2] + pts_[i3]) / 4.0;
  std::array<int, 4> s{i0, i1, i2, i3};
  if (pn.dot(pts_[i3] - pts_[i0]) > 0) std::swap(s[1], s[2]);
  // faces oriented outward: (0,1,2), (0,3,1), (1,3,2), (2,3,0)
  const int f0 = make_face(s[0], s[1], s[2]);
  const int f1 = make_face(s[0], s[3], s[1]);
  const int f2 = make_face(s[1], s[3], s[2]);
  const int f3 = make_face(s[2], s[3], s[0]);
  for (int f : {f0, f1, f2, f3}) {
    for (int e = 0; e < 3; ++e) {
      const int a = faces_[f].v[e], b = faces_[f].v[(e + 1) % 3];
      for (int g : {f0, f1, f2, f3}) {
        if (g == f) continue;
        const int ge = edge_index(faces_[g], b, a);
        if (ge >= 0) faces_[f].nbr[e] = g;
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    if (i == s[0] || i == s[1] || i == s[2] || i == s[3]) continue;
    for (int f : {f0, f1, f2, f3}) {
      if (dist(faces_[f], i) > eps_) {
        faces_[f].outside.push_back(i);
        break;
      }
    }
  }

  std::vector<int> stack_face, visible;
  std::vector<std::array<int, 3>> horizon;  // (a, b, outer face)
  int stamp = 0;
  for (std::size_t cursor = 0; cursor < faces_.size(); ++cursor) {
    if (!faces_[cursor].alive || faces_[cursor].outside.empty()) continue;
    Face& start = faces_[cursor];
    int apex = start.outside.front();
    double far = dist(start, apex);
    for (int p : start.outside)
      if (dist(start, p) > far) far = dist(start, p), apex = p;

    // flood the visible region, collecting edges against hidden faces
    ++stamp;
    visible.clear();
    horizon.clear();
    stack_face.assign(1, static_cast<int>(cursor));
    faces_[cursor].visit = stamp;
    while (!stack_face.empty()) {
      const int f = stack_face.back();
      stack_face.pop_back();
      visible.push_back(f);
      for (int e = 0; e < 3; ++e) {
        const int g = faces_[f].nbr[e];
        if (faces_[g].visit == stamp) continue;
        if (dist(faces_[g], apex) > eps_) {
          faces_[g].visit = stamp;
          stack_face.push_back(g);
        } else {
          horizon.push_back({faces_[f].v[e], faces_[f].v[(e + 1) % 3], g});
        }
      }
    }
    // order horizon edges into a loop a0->b0=a1->b1 ...
    {
      std::vector<std::array<int, 3>> loop;
      loop.reserve(horizon.size());
      std::vector<char> used(horizon.size(), 0);
      loop.push_back(horizon[0]);
      used[0] = 1;
      while (loop.size() < horizon.size()) {
        const int tail = loop.back()[1];
        bool found = false;
        for (std::size_t j = 0; j < horizon.size(); ++j) {
          if (!used[j] && horizon[j][0] == tail) {
            loop.push_back(horizon[j]);
            used[j] = 1;
            found = true;
            break;
          }
        }
        if (!found) throw SolverError("quickhull: horizon is not a simple loop");
      }
      horizon.swap(loop);
    }

    std::vector<int> orphans;
    for (int f : visible) {
      faces_[f].alive = false;
      orphans.insert(orphans.end(), faces_[f].outside.begin(), faces_[f].outside.end());
      faces_[f].outside.clear();
      faces_[f].outside.shrink_to_fit();
    }
    const int first = static_cast<int>(faces_.size());
    const int m = static_cast<int>(horizon.size());
    for (int j = 0; j < m; ++j) {
      const auto [a, b, outer] = horizon[j];
      const int nf = make_face(a, b, apex);
      const int oe = edge_index(faces_[outer], b, a);
      link(nf, 0, outer, oe);
    }
    for (int j = 0; j < m; ++j) {
      const int f = first + j;
      const int next = first + (j + 1) % m;
      // edge (b, apex) of f meets edge (apex, b) of next, i.e. next's edge 2
      link(f, 1, next, 2);
    }
    for (int p : orphans) {
      if (p == apex) continue;
      for (int j = 0; j < m; ++j) {
        if (dist(faces_[first + j], p) > eps_) {
          faces_[first + j].outside.push_back(p);
          break;
        }
      }
    }
  }

  std::vector<char> is_vertex(n, 0);
  for (const Face& f : faces_) {
    if (!f.alive) continue;
    out.facets.push_back({f.v, f.n, f.d});
    for (int v : f.v) is_vertex[v] = 1;
  }
  for (int i = 0; i < n; ++i)
    if (is_vertex[i]) out.vertices.push_back(i);
  out.affine_dim = 3;
  return out;
}

}  // namespace

HullResult convex_hull_3d(std::span<const Point> pts, double eps) {
  require(!pts.empty(), "convex hull of an empty point set");
  return QuickHull(pts, eps).run();
}

}  // namespace kplateau
