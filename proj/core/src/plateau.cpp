#include "kplateau/plateau.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "kplateau/barrier.hpp"

namespace kplateau {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class F>
void parallel_for(int count, int threads, F&& body) {
  threads = std::clamp(threads, 1, std::max(1, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (int i = t; i < count; i += threads) body(i);
    });
  for (auto& th : pool) th.join();
}

std::vector<std::pair<int, int>> edges(const ConvexBody& k) {
  std::vector<std::pair<int, int>> out;
  const auto& nb = k.neighbours();
  for (int i = 0; i < static_cast<int>(nb.size()); ++i)
    for (int j : nb[i])
      if (j > i) out.emplace_back(i, j);
  return out;
}

// Vertices of K n {<x, a> <= c}: vertices below the plane and edge crossings.
std::vector<Point> below_plane(const ConvexBody& k, const Vec3& a, double c, bool crossings_only = false) {
  std::vector<Point> out;
  const auto& V = k.vertices();
  if (!crossings_only)
    for (const auto& v : V)
      if (a.dot(v) <= c) out.push_back(v);
  for (const auto& [i, j] : edges(k)) {
    const double si = a.dot(V[i]) - c, sj = a.dot(V[j]) - c;
    if ((si < 0 && sj > 0) || (si > 0 && sj < 0)) out.push_back(V[i] + si / (si - sj) * (V[j] - V[i]));
  }
  return out;
}

struct Frame {
  Point base;
  Vec3 e1, e2, axis;
  int n;

  Vec2 coord(const Point& p) const {
    const Vec3 d = p - base;
    return Vec2(d.dot(e1), n == 2 ? d.dot(e2) : 0.0);
  }
  double height(const Point& p) const { return (p - base).dot(axis); }
  Point world(const Vec2& x, double t) const {
    Point p = base + x.x() * e1 + t * axis;
    if (n == 2) p += x.y() * e2;
    return p;
  }
};

Frame frame_of(const GraphChart& c) {
  Frame f;
  f.base = c.base_point;
  f.n = c.dim - 1;
  f.axis = c.axis();
  f.e1 = c.frame.col(0);
  f.e2 = c.dim == 3 ? Vec3(c.frame.col(1)) : Vec3::UnitZ();
  return f;
}

// Quadratic fit t = x'^T A x' / 2 + g.x' through the origin.
double fitted_curvature(const std::vector<Vec2>& x, const std::vector<double>& t, int n) {
  const int m = static_cast<int>(x.size());
  const int cols = n == 2 ? 5 : 2;
  if (m < cols + 1) return kNaN;
  Eigen::MatrixXd M(m, cols);
  Eigen::VectorXd rhs(m);
  for (int i = 0; i < m; ++i) {
    if (n == 2) M.row(i) << x[i].x() * x[i].x(), x[i].x() * x[i].y(), x[i].y() * x[i].y(), x[i].x(), x[i].y();
    else M.row(i) << x[i].x() * x[i].x(), x[i].x();
    rhs(i) = t[i];
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
  if (qr.rank() < cols) return kNaN;
  const Eigen::VectorXd c = qr.solve(rhs);
  if (n == 1) return 2 * c(0) / std::pow(1 + c(1) * c(1), 1.5);
  const double det = 4 * c(0) * c(2) - c(1) * c(1);
  const double g2 = c(3) * c(3) + c(4) * c(4);
  return det / ((1 + g2) * (1 + g2));
}

int vertex_index(const ConvexBody& k, const Point& x) {
  const double tol = 1e-9 * k.scale();
  const auto& V = k.vertices();
  for (int i = 0; i < static_cast<int>(V.size()); ++i)
    if ((V[i] - x).norm() <= tol) return i;
  return -1;
}

double excess_bin(double excess, double width) { return width > 0 ? std::round(excess / width) : excess; }

}  // namespace

std::string to_string(PointClass c) {
  switch (c) {
    case PointClass::frozen: return "frozen";
    case PointClass::smooth_constant_k: return "smooth_constant_k";
    case PointClass::needs_excision: return "needs_excision";
    case PointClass::lgp_singular: return "lgp_singular";
  }
  return "unknown";
}

FrozenSet FrozenSet::halfspace(const ConvexBody& k, const Vec3& normal, double offset) {
  require(normal.norm() > 0, "frozen half-space needs a normal");
  FrozenSet x;
  x.kind = Kind::halfspace;
  x.normal = normal.normalized();
  x.offset = offset / normal.norm();
  x.samples = below_plane(k, x.normal, x.offset);
  require(!x.samples.empty(), "frozen set is empty");
  return x;
}

FrozenSet FrozenSet::lower_half(const ConvexBody& k) {
  return halfspace(k, k.dim() == 2 ? Vec3::UnitY() : Vec3::UnitZ(), 0.0);
}

FrozenSet FrozenSet::from_samples(std::vector<Point> pts) {
  require(!pts.empty(), "frozen set is empty");
  FrozenSet x;
  x.kind = Kind::samples;
  x.samples = std::move(pts);
  return x;
}

double FrozenSet::distance(const Point& p) const {
  if (kind == Kind::halfspace) return std::max(0.0, normal.dot(p) - offset);
  double best = kInf;
  for (const auto& s : samples) best = std::min(best, (s - p).squaredNorm());
  return std::sqrt(best);
}

std::vector<Point> FrozenSet::points_on(const ConvexBody& body) const {
  return kind == Kind::halfspace ? below_plane(body, normal, offset) : samples;
}

double FrozenSet::min_height(const ConvexBody& body, const Point& base, const Vec3& axis) const {
  double best = kInf;
  for (const auto& p : points_on(body)) best = std::min(best, (p - base).dot(axis));
  return best;
}

BarrierState::BarrierState(ConvexBody b, FrozenSet x, double k_, double h_)
    : body(std::move(b)), X(std::move(x)), k(k_), h(h_) {
  require(body.valid() && body.full_dimensional(), "barrier body needs nonempty interior");
  require(k > 0 && h > 0, "curvature and membership tolerance must be positive");
  volumes.push_back(body.volume());
}

GraphChart excision_chart(const ConvexBody& body, const Point& x) {
  require(body.full_dimensional(), "chart needs a body with nonempty interior");
  const double tol = 1e-9 * body.scale();
  require(std::abs(body.signed_distance(x)) <= tol, "chart base point is not on the boundary");
  Vec3 n = Vec3::Zero();
  for (int f : body.facets_near(x, tol)) n += body.facets()[f].normal;
  require(n.norm() > 0, "no supporting facet at the chart base point");
  const Vec3 axis = -n.normalized();
  GraphChart c;
  c.dim = body.dim();
  c.base_point = x;
  if (c.dim == 2) {
    c.frame.col(0) = Vec3(-axis.y(), axis.x(), 0.0);
    c.frame.col(1) = axis;
    c.frame.col(2) = Vec3::UnitZ();
  } else {
    const Vec3 ref = std::abs(axis.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    const Vec3 e1 = (ref - ref.dot(axis) * axis).normalized();
    c.frame.col(0) = e1;
    c.frame.col(1) = axis.cross(e1);
    c.frame.col(2) = axis;
  }
  return c;
}

double max_excision_depth(const BarrierState& state, const GraphChart& chart) {
  return state.X.min_height(state.body, chart.base_point, chart.axis()) - state.collar();
}

BarrierState excise(const BarrierState& state, const GraphChart& chart, double delta, const ExcisionOptions& opts) {
  const ConvexBody& K = state.body;
  require(chart.dim == K.dim(), "chart and body dimensions differ");
  require(delta > 0, "excision depth must be positive");
  const Frame fr = frame_of(chart);
  const int n = fr.n;
  if (state.X.distance(fr.base) <= state.collar())
    throw DomainError("excision rejected: base point lies in the frozen set");
  const double depth = max_excision_depth(state, chart);
  if (delta > depth + 1e-12 * K.scale()) throw DomainError("excision rejected: domain reaches the frozen set");

  // Omega = projection of K n {t <= delta} = sublevel set of the envelope.
  const std::vector<Point> slab = below_plane(K, fr.axis, fr.axis.dot(fr.base) + delta);
  std::vector<Point> flat;
  for (const auto& p : slab) {
    const Vec2 c = fr.coord(p);
    flat.emplace_back(c.x(), c.y(), 0.0);
  }
  GraphDomain omega;
  std::optional<ConvexBody> poly;
  Vec2 centre;
  double inradius, radius;
  std::vector<Vec2> omega_vertices;
  if (n == 2) {
    poly.emplace(2, flat);
    if (!poly->full_dimensional()) throw DomainError("excision rejected: degenerate domain");
    omega = GraphDomain::polygon(*poly);
    const Point c = poly->centroid();
    centre = Vec2(c.x(), c.y());
    inradius = -poly->signed_distance(c);
    radius = 0.0;
    for (const auto& v : poly->vertices()) {
      omega_vertices.emplace_back(v.x(), v.y());
      radius = std::max(radius, (Vec2(v.x(), v.y()) - centre).norm());
    }
  } else {
    double lo = kInf, hi = -kInf;
    for (const auto& p : flat) lo = std::min(lo, p.x()), hi = std::max(hi, p.x());
    if (!(hi - lo > 1e-12 * K.scale())) throw DomainError("excision rejected: degenerate domain");
    omega = GraphDomain::interval(lo, hi);
    centre = Vec2(0.5 * (lo + hi), 0.0);
    inradius = radius = 0.5 * (hi - lo);
    omega_vertices = {Vec2(lo, 0.0), Vec2(hi, 0.0)};
  }

  const double k = opts.k.value_or(state.k);
  const double phi = phi_for_curvature(k);
  GraphProblem prob;
  prob.n = n;
  prob.domain = omega;
  prob.h = std::min(opts.ma_h, inradius / 8);
  prob.phi = [phi](const Vec2&) { return phi; };
  prob.G = GradientWeight::g0(n);
  {
    const double R = std::max(0.8 / phi, 1.05 * radius);
    const double top = std::sqrt(R * R - radius * radius);
    prob.barrier = [=](const Vec2& x) {
      const double q = n == 1 ? (x.x() - centre.x()) * (x.x() - centre.x()) : (x - centre).squaredNorm();
      return top - std::sqrt(std::max(R * R - q, 0.0));
    };
  }
  Excision rec;
  GraphSolution sol;
  try {
    sol = solve_dirichlet(prob, opts.solver);
  } catch (const DomainError& e) {
    // The cap barrier is not zero on straight edges; cut cells next to them can
    // break its discrete convexity. Retry on the circumscribed disk.
    if (n != 2 || std::string(e.what()).find("not positive definite") == std::string::npos) throw;
    prob.domain = GraphDomain::disk(centre, radius);
    prob.h = std::min(opts.ma_h, radius / 8);
    sol = solve_dirichlet(prob, opts.solver);
    rec.circumscribed = true;
    // Only usable when the disk solution is flat to tolerance along the edges of Omega.
    const double tol = opts.hull_tol < 0 ? state.h : opts.hull_tol;
    for (int i = 0; i < sol.disc->size(); ++i) {
      const Vec2 x = sol.disc->coord(i);
      const double sd = poly->signed_distance(Point(x.x(), x.y(), 0.0));
      if (sd > 0 && sd <= 1.5 * prob.h && -sol.f(i) > tol)
        throw DomainError("no admissible lower barrier: circumscribed solution does not vanish on the domain boundary");
    }
  }

  rec.base = fr.base;
  rec.axis = fr.axis;
  rec.delta = delta;
  rec.omega_vertices = static_cast<int>(omega_vertices.size());
  rec.omega_inradius = inradius;
  rec.omega_radius = radius;
  rec.h = prob.h;
  rec.unknowns = sol.disc->size();
  rec.newton_iterations = sol.diag.newton_iterations;
  rec.residual = sol.diag.residual_norm;

  // Patch: interior nodes over Omega at delta + u and the domain vertices at
  // delta (grid crossings of the boundary would sit on its straight edges).
  // Comparison f >= f_hat means the patch lies in K.
  std::vector<Point> patch;
  std::vector<char> interior;
  for (int i = 0; i < sol.disc->size(); ++i) {
    const Vec2 x = sol.disc->coord(i);
    if (poly && poly->signed_distance(Point(x.x(), x.y(), 0.0)) > 0) continue;
    patch.push_back(fr.world(x, delta + sol.f(i)));
    interior.push_back(1);
  }
  for (const auto& v : omega_vertices) {
    patch.push_back(fr.world(v, delta));
    interior.push_back(0);
  }
  const double ctol = opts.containment_tol < 0 ? state.h : opts.containment_tol;
  for (auto& p : patch) {
    const double sd = K.signed_distance(p);
    if (sd <= 0) continue;
    if (sd > ctol) {
      std::ostringstream s;
      s << "excision rejected: patch leaves the body by " << sd << " (comparison with the chart graph fails)";
      throw DomainError(s.str());
    }
    rec.max_clamp = std::max(rec.max_clamp, sd);
    p = K.project(p).point;
  }

  std::vector<Point> pts;
  const double eps_t = 1e-12 * K.scale();
  for (const auto& v : K.vertices())
    if (fr.height(v) >= delta - eps_t) pts.push_back(v);
  for (const auto& p : below_plane(K, fr.axis, fr.axis.dot(fr.base) + delta, true)) pts.push_back(p);
  pts.insert(pts.end(), patch.begin(), patch.end());
  ConvexBody next(K.dim(), pts);

  const double htol = opts.hull_tol < 0 ? ctol : opts.hull_tol;
  for (std::size_t i = 0; i < patch.size(); ++i) {
    if (!interior[i]) continue;
    if (next.signed_distance(patch[i]) < -htol) {
      std::ostringstream s;
      s << "excision rejected: patch is not convex (depth " << -next.signed_distance(patch[i]) << " at node " << i
        << " of " << patch.size() << ", coord " << fr.coord(patch[i]).transpose() << ")";
      throw DomainError(s.str());
    }
  }

  rec.volume_before = K.volume();
  rec.volume_after = next.volume();
  // Displacements below the membership tolerance leave the body as it is.
  if (rec.volume_before - rec.volume_after > 1e-12 * rec.volume_before) rec.hausdorff = hausdorff_distance(K, next);
  rec.changed = rec.hausdorff > ctol;
  BarrierState out = state;
  if (rec.changed) {
    out.body = next;
    out.volumes.push_back(rec.volume_after);
  } else {
    rec.volume_after = rec.volume_before;
  }
  out.history.push_back(rec);
  return out;
}

double vertex_curvature(const ConvexBody& body, int vertex) {
  const auto& V = body.vertices();
  require(vertex >= 0 && vertex < static_cast<int>(V.size()), "vertex index out of range");
  const Point& x = V[vertex];
  const GraphChart c = excision_chart(body, x);
  const Frame fr = frame_of(c);
  const auto& nb = body.neighbours();
  std::set<int> ring(nb[vertex].begin(), nb[vertex].end());
  for (int a : nb[vertex]) ring.insert(nb[a].begin(), nb[a].end());
  ring.erase(vertex);
  std::vector<Vec2> xs;
  std::vector<double> ts;
  for (int q : ring) {
    xs.push_back(fr.coord(V[q]));
    ts.push_back(fr.height(V[q]));
  }
  return fitted_curvature(xs, ts, fr.n);
}

namespace {

// k/2 comparison at an LGP point: true when the weaker-curvature solution dips
// into the body, i.e. the point cannot sit on a volume minimiser.
bool lgp_contradiction(const BarrierState& state, const Point& x, const ExcisionOptions& base) {
  const GraphChart c = excision_chart(state.body, x);
  const double depth = max_excision_depth(state, c);
  const double delta = std::min(depth, 0.1 * state.body.diameter());
  if (!(delta > 0)) return false;
  ExcisionOptions o = base;
  o.k = 0.5 * state.k;
  try {
    const BarrierState trial = excise(state, c, delta, o);
    return trial.history.back().changed;
  } catch (const std::exception&) {
    return false;
  }
}

PointReport classify_vertex(const BarrierState& state, int v, const ClassifyOptions& opts) {
  PointReport r;
  const Point& x = state.body.vertices()[v];
  if (state.X.contains(x, state.collar())) {
    r.tag = PointClass::frozen;
    return r;
  }
  const double target = target_gauss_curvature(state.dim(), state.k);
  LgpOptions lo;
  lo.sample_directions = false;
  r.lgp = has_local_geodesic_property(state.body, x, lo);
  r.curvature = vertex_curvature(state.body, v);
  r.excess = r.curvature - target;
  if (r.lgp) {
    r.tag = PointClass::lgp_singular;
    if (opts.lgp_remedy && lgp_contradiction(state, x, opts.excision)) {
      r.tag = PointClass::needs_excision;
      r.remedy_applied = true;
    }
    return r;
  }
  if (std::isfinite(r.curvature) && std::abs(r.excess) <= opts.tol_kappa * target) r.tag = PointClass::smooth_constant_k;
  else r.tag = PointClass::needs_excision;
  return r;
}

}  // namespace

PointReport classify_point(const BarrierState& state, const Point& x, const ClassifyOptions& opts) {
  const int v = vertex_index(state.body, x);
  if (v >= 0) return classify_vertex(state, v, opts);
  PointReport r;
  if (state.X.contains(x, state.collar())) {
    r.tag = PointClass::frozen;
    return r;
  }
  LgpOptions lo;
  lo.sample_directions = false;
  r.lgp = has_local_geodesic_property(state.body, x, lo);
  r.curvature = r.lgp ? 0.0 : kNaN;
  r.excess = r.curvature - target_gauss_curvature(state.dim(), state.k);
  r.tag = PointClass::needs_excision;
  if (r.lgp) {
    r.tag = PointClass::lgp_singular;
    if (opts.lgp_remedy && lgp_contradiction(state, x, opts.excision)) {
      r.tag = PointClass::needs_excision;
      r.remedy_applied = true;
    }
  }
  return r;
}

PointClass classify_boundary_point(const BarrierState& state, const Point& x, const ClassifyOptions& opts) {
  return classify_point(state, x, opts).tag;
}

std::vector<Point> free_surface(const BarrierState& state) {
  std::vector<Point> out;
  for (const auto& v : state.body.vertices())
    if (state.X.distance(v) > 0) out.push_back(v);
  return out;
}

std::map<PointClass, int> classification_histogram(const BarrierState& state, const ClassifyOptions& opts,
                                                   int threads) {
  const int nv = static_cast<int>(state.body.vertices().size());
  std::vector<PointReport> reports(nv);
  parallel_for(nv, threads, [&](int i) { reports[i] = classify_vertex(state, i, opts); });
  std::map<PointClass, int> h;
  for (const auto& r : reports) ++h[r.tag];
  return h;
}

BarrierState solve_plateau(const ConvexBody& k, const FrozenSet& X, double curvature, const PlateauOptions& opts) {
  require(opts.max_iters >= 0 && opts.tol_H > 0, "invalid plateau options");
  BarrierState state(k, X, curvature, opts.h);
  ClassifyOptions co;
  co.tol_kappa = opts.tol_kappa;
  co.lgp_remedy = opts.lgp_remedy;
  co.excision.ma_h = opts.ma_h;
  const double target = target_gauss_curvature(state.dim(), curvature);

  for (int it = 0;; ++it) {
    const auto& V = state.body.vertices();
    const int nv = static_cast<int>(V.size());
    std::vector<PointReport> reports(nv);
    parallel_for(nv, opts.threads, [&](int i) { reports[i] = classify_vertex(state, i, co); });

    IterationLog log;
    log.iteration = it;
    log.volume = state.body.volume();
    log.hausdorff_increment = state.hausdorff_increments.empty() ? 0.0 : state.hausdorff_increments.back();
    log.min_free_curvature = kInf;
    log.max_free_curvature = -kInf;
    struct Site {
      double bin, depth;
      Point x;
    };
    std::vector<Site> sites;
    const std::vector<Point> frozen_pts = state.X.points_on(state.body);
    for (int i = 0; i < nv; ++i) {
      const auto& r = reports[i];
      ++log.counts[r.tag];
      if (r.tag == PointClass::frozen) continue;
      if (std::isfinite(r.curvature)) {
        log.min_free_curvature = std::min(log.min_free_curvature, r.curvature);
        log.max_free_curvature = std::max(log.max_free_curvature, r.curvature);
      }
      if (r.tag != PointClass::needs_excision) continue;
      const GraphChart c = excision_chart(state.body, V[i]);
      double depth = kInf;
      for (const auto& p : frozen_pts) depth = std::min(depth, (p - V[i]).dot(c.axis()));
      depth -= state.collar();
      if (depth < opts.min_delta) continue;
      const double bin = std::isfinite(r.excess) ? excess_bin(std::abs(r.excess), opts.tol_kappa * target) : kInf;
      sites.push_back({bin, depth, V[i]});
    }
    std::sort(sites.begin(), sites.end(), [](const Site& a, const Site& b) {
      if (a.bin != b.bin) return a.bin > b.bin;
      if (a.depth != b.depth) return a.depth > b.depth;
      return std::lexicographical_compare(a.x.data(), a.x.data() + 3, b.x.data(), b.x.data() + 3);
    });

    if (it >= opts.max_iters) {
      state.log.push_back(log);
      state.status = "max_iters";
      break;
    }
    if (sites.empty()) {
      state.log.push_back(log);
      // Remaining violators, if any, sit too close to X for a slab of depth min_delta.
      state.status = log.counts[PointClass::needs_excision] == 0 ? "converged_smooth" : "stopped_at_collar";
      break;
    }

    bool done = false, progressed = false;
    for (const auto& s : sites) {
      if (log.attempts >= opts.max_attempts) break;
      ++log.attempts;
      const GraphChart chart = excision_chart(state.body, s.x);
      double delta = s.depth;
      for (int shrink = 0; shrink < 3 && delta >= opts.min_delta; ++shrink, delta *= 0.5) {
        try {
          BarrierState next = excise(state, chart, delta, co.excision);
          const Excision& e = next.history.back();
          if (e.changed && e.volume_after > e.volume_before) throw SolverError("monotonicity violated");
          const double inc = e.changed ? e.hausdorff : 0.0;
          state = std::move(next);
          state.hausdorff_increments.push_back(inc);
          progressed = true;
          done = inc < opts.tol_H;
          break;
        } catch (const DomainError& err) {
          // Too large a domain for the curvature: retry closer to the base.
          if (std::string(err.what()).find("no admissible lower barrier") == std::string::npos) break;
        } catch (const SolverError& err) {
          if (std::string(err.what()) == "monotonicity violated") throw;
          break;
        }
      }
      if (progressed) break;
    }
    state.log.push_back(log);
    if (!progressed) {
      state.status = "no_admissible_site";
      break;
    }
    if (done) {
      state.status = "converged_hausdorff";
      // Final classification of the stopped body.
      const int nf = static_cast<int>(state.body.vertices().size());
      std::vector<PointReport> fin(nf);
      parallel_for(nf, opts.threads, [&](int i) { fin[i] = classify_vertex(state, i, co); });
      IterationLog last;
      last.iteration = it + 1;
      last.volume = state.body.volume();
      last.hausdorff_increment = state.hausdorff_increments.back();
      last.min_free_curvature = kInf;
      last.max_free_curvature = -kInf;
      for (const auto& r : fin) {
        ++last.counts[r.tag];
        if (r.tag == PointClass::frozen || !std::isfinite(r.curvature)) continue;
        last.min_free_curvature = std::min(last.min_free_curvature, r.curvature);
        last.max_free_curvature = std::max(last.max_free_curvature, r.curvature);
      }
      state.log.push_back(last);
      break;
    }
  }
  return state;
}

}  // namespace kplateau
