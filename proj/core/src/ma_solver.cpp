#include "kplateau/ma_solver.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace kplateau {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Nodes closer than this (relative to h) to the boundary along a stencil line
// are treated as boundary nodes.
constexpr double kMinArm = 1e-6;

struct NodeF {
  bool pd = false;
  double F = 0.0;
  Eigen::Matrix2d DF = Eigen::Matrix2d::Zero();
};

NodeF node_F(const Eigen::Matrix2d& H, int n) {
  NodeF r;
  if (n == 1) {
    r.pd = H(0, 0) > 0;
    r.F = H(0, 0);
    r.DF(0, 0) = 1.0;
    return r;
  }
  const double det = H(0, 0) * H(1, 1) - H(0, 1) * H(1, 0);
  r.pd = H(0, 0) > 0 && det > 0;
  if (!r.pd) return r;
  r.F = std::sqrt(det);
  r.DF << H(1, 1), -H(0, 1), -H(1, 0), H(0, 0);
  r.DF /= 2.0 * r.F;
  return r;
}

Eigen::VectorXd head(const Eigen::Vector2d& g, int n) { return g.head(n); }

double weight_value(const GradientWeight& G, const Eigen::Vector2d& g, int n, double t) {
  return t * G.value(head(g, n)) + (1.0 - t);
}

Eigen::Vector2d weight_gradient(const GradientWeight& G, const Eigen::Vector2d& g, int n, double t) {
  Eigen::Vector2d out = Eigen::Vector2d::Zero();
  out.head(n) = t * G.gradient(head(g, n));
  return out;
}

// Row of the linearization at node p for the path parameter t.
double entry_value(const Discretization::Entry& e, const Eigen::Matrix2d& DF, const Eigen::Vector2d& DG, double phi,
                   int n) {
  using Q = Discretization::Quantity;
  double v = DF(0, 0) * e.w[Q::xx];
  if (n == 2) v += DF(1, 1) * e.w[Q::yy] + 2.0 * DF(0, 1) * e.w[Q::xy];
  v -= phi * (DG.x() * e.w[Q::gx] + DG.y() * e.w[Q::gy]);
  return v;
}

struct Fields {
  std::vector<Eigen::Matrix2d> H;
  std::vector<Eigen::Vector2d> g;
  std::vector<NodeF> F;
  bool pd = true;
};

Fields fields(const Discretization& d, const Eigen::VectorXd& f) {
  Fields out;
  const int N = d.size();
  out.H.resize(N);
  out.g.resize(N);
  out.F.resize(N);
  for (int i = 0; i < N; ++i) {
    out.H[i] = d.hessian(f, i);
    out.g[i] = d.gradient(f, i);
    out.F[i] = node_F(out.H[i], d.n());
    out.pd = out.pd && out.F[i].pd;
  }
  return out;
}

Eigen::VectorXd residual(const Discretization& d, const Fields& fl, const Eigen::VectorXd& phi, const GradientWeight& G,
                         double t) {
  Eigen::VectorXd r(d.size());
  for (int i = 0; i < d.size(); ++i) r(i) = fl.F[i].F - phi(i) * weight_value(G, fl.g[i], d.n(), t);
  return r;
}

Eigen::SparseMatrix<double> jacobian(const Discretization& d, const Fields& fl, const Eigen::VectorXd& phi,
                                     const GradientWeight& G, double t) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(std::size_t(d.size()) * 9);
  for (int i = 0; i < d.size(); ++i) {
    const Eigen::Vector2d DG = weight_gradient(G, fl.g[i], d.n(), t);
    for (const auto& e : d.stencil(i).entries) trip.emplace_back(i, e.node, entry_value(e, fl.F[i].DF, DG, phi(i), d.n()));
  }
  Eigen::SparseMatrix<double> J(d.size(), d.size());
  J.setFromTriplets(trip.begin(), trip.end());
  J.makeCompressed();
  return J;
}

double softmax3(double a, double b, double c, double beta) {
  const double m = std::max({a, b, c});
  return m + std::log(std::exp(beta * (a - m)) + std::exp(beta * (b - m)) + std::exp(beta * (c - m))) / beta;
}

class Newton {
 public:
  Newton(const Discretization& d, const GradientWeight& G, const SolveOptions& o, double tol)
      : d_(d), G_(G), o_(o), tol_(tol) {}

  // Solves in place; returns false (f untouched) on failure.
  bool solve(Eigen::VectorXd& f, const Eigen::VectorXd& phi, double t, int& iterations) {
    Eigen::VectorXd x = f;
    Fields fl = fields(d_, x);
    if (!fl.pd) return false;
    Eigen::VectorXd r = residual(d_, fl, phi, G_, t);
    double norm = r.lpNorm<Eigen::Infinity>();
    for (int it = 0; it < o_.max_newton; ++it) {
      if (norm <= tol_) {
        f = x;
        return true;
      }
      const Eigen::SparseMatrix<double> J = jacobian(d_, fl, phi, G_, t);
      if (!analyzed_) {
        lu_.analyzePattern(J);
        analyzed_ = true;
      }
      lu_.factorize(J);
      if (lu_.info() != Eigen::Success) return false;
      const Eigen::VectorXd step = lu_.solve(-r);
      if (lu_.info() != Eigen::Success || !step.allFinite()) return false;
      ++iterations;
      bool accepted = false;
      for (double lambda = 1.0; lambda >= o_.damping_floor; lambda *= 0.5) {
        Eigen::VectorXd trial = x + lambda * step;
        Fields tf = fields(d_, trial);
        if (!tf.pd) continue;
        Eigen::VectorXd tr = residual(d_, tf, phi, G_, t);
        const double tn = tr.lpNorm<Eigen::Infinity>();
        if (tn < norm || tn <= tol_) {
          x = std::move(trial);
          fl = std::move(tf);
          r = std::move(tr);
          norm = tn;
          accepted = true;
          break;
        }
      }
      if (!accepted) return false;
    }
    if (norm <= tol_) {
      f = x;
      return true;
    }
    return false;
  }

 private:
  const Discretization& d_;
  const GradientWeight& G_;
  const SolveOptions& o_;
  double tol_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  bool analyzed_ = false;
};

}  // namespace

Discretization::Discretization(const GraphDomain& domain, double h) : domain_(domain), h_(h) {
  require(h > 0, "grid spacing must be positive");
  const int n = domain.n();
  require(n == 1 || n == 2, "graph dimension must be 1 or 2");
  const Vec2 lo = domain.lower(), hi = domain.upper();
  grid_.dim = 2;
  grid_.origin = Vec3(lo.x(), n == 2 ? lo.y() : 0.0, 0.0);
  grid_.spacing = h;
  grid_.shape[0] = static_cast<int>(std::ceil((hi.x() - lo.x()) / h - 1e-9)) + 1;
  grid_.shape[1] = n == 2 ? static_cast<int>(std::ceil((hi.y() - lo.y()) / h - 1e-9)) + 1 : 1;
  grid_.shape[2] = 1;
  require(grid_.size() < 50'000'000, "grid too large");

  struct Dir {
    int di, dj;
  };
  std::vector<Dir> dirs = {{1, 0}};
  if (n == 2) dirs = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};

  auto pos = [&](int i, int j) { return Vec2(grid_.origin.x() + h * i, grid_.origin.y() + h * j); };
  // Arm along (di, dj) from node (i, j): length and whether it is cut.
  auto arm = [&](int i, int j, int di, int dj) {
    const Vec2 d(di, dj);
    const double step = h * d.norm();
    const double hit = domain_.ray_hit(pos(i, j), d.normalized(), step);
    return std::isfinite(hit) ? std::pair{hit, true} : std::pair{step, false};
  };

  node_of_.assign(grid_.size(), -1);
  for (int i = 0; i < grid_.shape[0]; ++i) {
    for (int j = 0; j < grid_.shape[1]; ++j) {
      const Vec2 x = pos(i, j);
      if (!domain_.inside(x)) continue;
      bool ok = true;
      for (const auto& d : dirs)
        for (int s : {1, -1}) ok = ok && arm(i, j, s * d.di, s * d.dj).first >= kMinArm * h;
      if (!ok) continue;
      node_of_[grid_.index(i, j)] = static_cast<int>(coords_.size());
      coords_.push_back(x);
    }
  }
  require(!coords_.empty(), "grid has no interior nodes");

  stencils_.resize(coords_.size());
  for (int i = 0; i < grid_.shape[0]; ++i) {
    for (int j = 0; j < grid_.shape[1]; ++j) {
      const int p = node_of_[grid_.index(i, j)];
      if (p < 0) continue;
      Stencil& st = stencils_[p];
      std::map<int, std::array<double, 5>> acc;
      acc[p] = {};
      for (std::size_t k = 0; k < dirs.size(); ++k) {
        const auto [di, dj] = dirs[k];
        double len[2];
        int nb[2];
        for (int side = 0; side < 2; ++side) {
          const int s = side == 0 ? 1 : -1;
          const auto [a, cut] = arm(i, j, s * di, s * dj);
          len[side] = a;
          nb[side] = -1;
          if (cut) {
            st.full = false;
            boundary_.push_back(coords_[p] + a * Vec2(s * di, s * dj).normalized());
            continue;
          }
          const int qi = i + s * di, qj = j + s * dj;
          if (grid_.inside(qi, qj)) nb[side] = node_of_[grid_.index(qi, qj)];
          if (nb[side] < 0) st.full = false;
        }
        const double a = len[0], b = len[1];
        const double w2[3] = {2.0 / (a * (a + b)), -2.0 / (a * b), 2.0 / (b * (a + b))};
        const double w1[3] = {b / (a * (a + b)), (a - b) / (a * b), -a / (b * (a + b))};
        const int ids[3] = {nb[0], p, nb[1]};
        for (int m = 0; m < 3; ++m) {
          if (ids[m] < 0) continue;
          auto& w = acc[ids[m]];
          switch (k) {
            case 0:
              w[xx] += w2[m];
              w[gx] += w1[m];
              break;
            case 1:
              w[yy] += w2[m];
              w[gy] += w1[m];
              break;
            case 2:
              w[xy] += 0.5 * w2[m];
              break;
            default:
              w[xy] -= 0.5 * w2[m];
              break;
          }
        }
      }
      st.entries.push_back({p, acc[p]});
      for (const auto& [node, w] : acc)
        if (node != p) st.entries.push_back({node, w});
    }
  }
}

Eigen::VectorXd Discretization::sample(const ScalarField& f) const {
  Eigen::VectorXd v(size());
  for (int i = 0; i < size(); ++i) v(i) = f(coords_[i]);
  return v;
}

Eigen::Matrix2d Discretization::hessian(const Eigen::VectorXd& f, int i) const {
  double a = 0, b = 0, c = 0;
  for (const auto& e : stencils_[i].entries) {
    const double v = f(e.node);
    a += e.w[xx] * v;
    b += e.w[yy] * v;
    c += e.w[xy] * v;
  }
  Eigen::Matrix2d H;
  H << a, c, c, b;
  return H;
}

Eigen::Vector2d Discretization::gradient(const Eigen::VectorXd& f, int i) const {
  Eigen::Vector2d g = Eigen::Vector2d::Zero();
  for (const auto& e : stencils_[i].entries) {
    const double v = f(e.node);
    g.x() += e.w[gx] * v;
    g.y() += e.w[gy] * v;
  }
  return g;
}

GridField GraphSolution::to_grid_field() const {
  require(disc != nullptr, "solution has no discretization");
  GridField out(disc->grid(), kNaN);
  const auto& spec = disc->grid();
  for (int i = 0; i < spec.shape[0]; ++i)
    for (int j = 0; j < spec.shape[1]; ++j) {
      const int u = disc->unknown_at(i, j);
      const Point x = spec.node(i, j);
      if (u >= 0) out.at(i, j) = f(u);
      else if (disc->domain().level(Vec2(x.x(), x.y())) <= 0) out.at(i, j) = 0.0;
    }
  return out;
}

GraphSolution evaluate_solution(std::shared_ptr<const Discretization> disc, Eigen::VectorXd f, const ScalarField& phi,
                                const GradientWeight& G) {
  require(disc != nullptr, "missing discretization");
  require(f.size() == disc->size(), "value count does not match the grid");
  GraphSolution s;
  s.disc = std::move(disc);
  s.f = std::move(f);
  const Discretization& d = *s.disc;
  const Fields fl = fields(d, s.f);
  const Eigen::VectorXd ph = d.sample(phi);
  s.residual = residual(d, fl, ph, G, 1.0);
  s.hessian = fl.H;
  s.gradient = fl.g;
  s.lambda_max.resize(d.size());
  auto& dg = s.diag;
  for (int i = 0; i < d.size(); ++i) {
    const Eigen::Matrix2d H = d.n() == 1 ? Eigen::Matrix2d(Eigen::Vector2d(fl.H[i](0, 0), 0.0).asDiagonal()) : fl.H[i];
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(H, Eigen::EigenvaluesOnly);
    const double lmax = d.n() == 1 ? H(0, 0) : es.eigenvalues()(1);
    const double norm = es.eigenvalues().cwiseAbs().maxCoeff();
    s.lambda_max(i) = lmax;
    dg.sup_f = std::max(dg.sup_f, std::abs(s.f(i)));
    dg.sup_grad = std::max(dg.sup_grad, fl.g[i].head(d.n()).norm());
    dg.sup_hess = std::max(dg.sup_hess, norm);
    dg.pogorelov = std::max(dg.pogorelov, std::abs(s.f(i)) * norm);
  }
  dg.residual_norm = s.residual.lpNorm<Eigen::Infinity>();
  return s;
}

double gaussian_curvature_of_graph(const GraphSolution& sol, int node) {
  require(sol.disc != nullptr && node >= 0 && node < sol.disc->size(), "node index out of range");
  if (!sol.disc->stencil(node).full) throw DomainError("boundary node: stencil is cut by the boundary");
  const int n = sol.disc->n();
  return graph_curvature(sol.hessian[node].topLeftCorner(n, n), sol.gradient[node].head(n));
}

LinearizedOperator assemble_linearization(const GraphSolution& sol, const GraphProblem& prob) {
  require(sol.disc != nullptr, "solution has no discretization");
  const Discretization& d = *sol.disc;
  const Fields fl = fields(d, sol.f);
  if (!fl.pd) throw DomainError("left cone Gamma");
  const Eigen::VectorXd phi = d.sample(prob.phi);
  LinearizedOperator L;
  L.B.resize(d.size());
  L.b.resize(d.size());
  L.Lambda.resize(d.size());
  for (int i = 0; i < d.size(); ++i) {
    L.B[i] = fl.F[i].DF;
    if (d.n() == 1) L.B[i] = Eigen::Vector2d(fl.F[i].DF(0, 0), 0.0).asDiagonal();
    L.b[i] = -phi(i) * weight_gradient(prob.G, fl.g[i], d.n(), 1.0);
    L.Lambda(i) = L.B[i].trace();
  }
  L.matrix = jacobian(d, fl, phi, prob.G, 1.0);
  return L;
}

double barrier_margin(const Discretization& d, const GraphProblem& prob) {
  require(static_cast<bool>(prob.barrier), "problem has no lower barrier");
  const Fields fl = fields(d, d.sample(prob.barrier));
  if (!fl.pd) throw DomainError("no admissible lower barrier: Hessian not positive definite");
  const Eigen::VectorXd phi = d.sample(prob.phi);
  return residual(d, fl, phi, prob.G, 1.0).minCoeff();
}

GraphSolution solve_dirichlet(const GraphProblem& prob, const SolveOptions& opts) {
  require(prob.n == prob.domain.n(), "problem and domain dimensions differ");
  require(static_cast<bool>(prob.phi), "problem has no right-hand side");
  require(static_cast<bool>(prob.barrier), "problem has no lower barrier");
  require(opts.alpha > 0 && opts.alpha < 1, "alpha must lie in (0, 1)");
  require(opts.t_final >= 0 && opts.t_final <= 1, "t_final must lie in [0, 1]");
  const double tol = opts.tol > 0 ? opts.tol : prob.resolved_tol();
  auto disc = opts.discretization ? opts.discretization : std::make_shared<const Discretization>(prob.domain, prob.h);
  const Discretization& d = *disc;
  const int N = d.size();

  const Eigen::VectorXd phi = d.sample(prob.phi);
  if (!(phi.minCoeff() > 0)) throw DomainError("phi must be positive at every node");
  const Eigen::VectorXd fb = d.sample(prob.barrier);
  const Fields bf = fields(d, fb);
  if (!bf.pd) throw DomainError("no admissible lower barrier: Hessian not positive definite");
  Eigen::VectorXd Fb(N), Gb(N);
  for (int i = 0; i < N; ++i) {
    Fb(i) = bf.F[i].F;
    Gb(i) = prob.G.value(head(bf.g[i], d.n()));
  }
  const double margin = (Fb - phi.cwiseProduct(Gb)).minCoeff();
  if (!(margin > 0)) {
    std::ostringstream s;
    s << "no admissible lower barrier (margin " << margin << ")";
    throw DomainError(s.str());
  }

  // Path constants: f_hat stays a strict subsolution of every (phi_t, G_t).
  const double alpha = opts.alpha;
  const Eigen::VectorXd phi0 = alpha * Fb;
  const double gmax = Gb.maxCoeff();
  auto delta0_ok = [&](double d0) {
    for (int s = 0; s <= 256; ++s) {
      const double u = s / 256.0;
      if (alpha * (1 - u) * (u * d0 * (gmax - 1) + 1) >= 1) return false;
    }
    return true;
  };
  double delta0 = 1.0;
  while (!delta0_ok(delta0)) delta0 *= 0.5;
  // G_t <= G for t <= 1, so the second branch stays below F(D^2 f_hat)/G_t.
  const double delta1 = 1.0;
  const double eps = 0.5 * std::min({Fb.cwiseQuotient(Gb).minCoeff(), phi.minCoeff(), phi0.minCoeff()});
  const double beta = opts.softmax_sharpness;

  auto phi_at = [&](double t) {
    if (t <= 0) return Eigen::VectorXd(phi0);
    if (t >= 1) return Eigen::VectorXd(phi);
    Eigen::VectorXd out(N);
    for (int i = 0; i < N; ++i)
      out(i) = softmax3((1 - t / delta0) * phi0(i), (1 - (1 - t) / delta1) * phi(i), eps, beta);
    return out;
  };

  SolutionDiagnostics diag;
  diag.tol = tol;
  diag.barrier_margin = margin;
  diag.delta0 = delta0;
  diag.delta1 = delta1;
  diag.eps = eps;

  Newton newton(d, prob.G, opts, tol);
  Eigen::VectorXd f = alpha * fb;
  double t = 0.0;
  if (!newton.solve(f, phi_at(0.0), 0.0, diag.newton_iterations))
    throw SolverError("continuation stalled at t=0");
  diag.t_path.push_back(0.0);
  diag.min_barrier_gap = (f - fb).minCoeff();
  double dt = opts.t_step;
  while (t < opts.t_final) {
    const double next = std::min(opts.t_final, t + dt);
    Eigen::VectorXd trial = f;
    if (newton.solve(trial, phi_at(next), next, diag.newton_iterations)) {
      f = std::move(trial);
      t = next;
      diag.t_path.push_back(t);
      diag.min_barrier_gap = std::min(diag.min_barrier_gap, (f - fb).minCoeff());
      dt = std::min(opts.t_step, 2 * dt);
      continue;
    }
    dt *= 0.5;
    if (dt < opts.min_t_step) {
      std::ostringstream s;
      s << "continuation stalled at t=" << t << " (step " << 2 * dt << ", newton " << diag.newton_iterations << ")";
      throw SolverError(s.str());
    }
  }

  GraphSolution sol = evaluate_solution(disc, std::move(f), prob.phi, prob.G);
  const SolutionDiagnostics fields_diag = sol.diag;
  sol.diag = diag;
  sol.diag.sup_f = fields_diag.sup_f;
  sol.diag.sup_grad = fields_diag.sup_grad;
  sol.diag.sup_hess = fields_diag.sup_hess;
  sol.diag.pogorelov = fields_diag.pogorelov;
  sol.diag.residual_norm = fields_diag.residual_norm;
  return sol;
}

BoundsReport verify_bounds(const GraphSolution& sol, const GraphProblem& prob) {
  BoundsReport r;
  const Discretization& d = *sol.disc;
  const Eigen::VectorXd fb = d.sample(prob.barrier);
  for (int i = 0; i < d.size(); ++i) {
    r.sup_barrier = std::max(r.sup_barrier, std::abs(fb(i)));
    r.sup_barrier_grad = std::max(r.sup_barrier_grad, d.gradient(fb, i).head(d.n()).norm());
    r.sup_f = std::max(r.sup_f, std::abs(sol.f(i)));
    r.sup_grad = std::max(r.sup_grad, sol.gradient[i].head(d.n()).norm());
    const double hn = d.n() == 1 ? std::abs(sol.hessian[i](0, 0))
                                 : Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(sol.hessian[i], Eigen::EigenvaluesOnly)
                                       .eigenvalues()
                                       .cwiseAbs()
                                       .maxCoeff();
    r.pogorelov = std::max(r.pogorelov, std::abs(sol.f(i)) * hn);
  }
  r.max_f = sol.f.maxCoeff();
  r.c0 = r.sup_f <= r.sup_barrier;
  r.c1 = r.sup_grad <= r.sup_barrier_grad;
  r.pogorelov_finite = std::isfinite(r.pogorelov);
  r.max_on_boundary = r.max_f <= 0.0;
  return r;
}

double pogorelov_spread(std::span<const double> values) {
  require(!values.empty(), "no values");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return *hi > 0 ? (*hi - *lo) / *hi : 0.0;
}

ScalarField auto_cap_barrier(const GraphDomain& domain, double phi_max, double scale) {
  require(domain.round(), "auto-cap barrier needs a disk or interval domain");
  require(phi_max > 0 && scale > 0, "auto-cap needs positive phi and scale");
  const Vec2 c = domain.center();
  const double r = domain.radius();
  const double R = std::max(0.8 / phi_max, 1.05 * r);
  const double top = std::sqrt(R * R - r * r);
  const int n = domain.n();
  return [=](const Vec2& x) {
    const double q = n == 1 ? (x.x() - c.x()) * (x.x() - c.x()) : (x - c).squaredNorm();
    return scale * (top - std::sqrt(R * R - q));
  };
}

double holder_seminorm(const GraphSolution& sol, double alpha, std::int64_t sample_pairs, std::uint64_t seed) {
  std::vector<Vec2> x(sol.disc->coords());
  std::vector<double> v(sol.f.data(), sol.f.data() + sol.f.size());
  for (const auto& b : sol.disc->boundary_points()) {
    x.push_back(b);
    v.push_back(0.0);
  }
  return holder_seminorm(x, v, alpha, sample_pairs, seed);
}

}  // namespace kplateau
