#pragma once

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Sparse>

#include "kplateau/domain.hpp"
#include "kplateau/grid.hpp"
#include "kplateau/monge_ampere.hpp"

namespace kplateau {

using ScalarField = std::function<double(const Vec2&)>;

// Finite-difference grid on a GraphDomain. Unknowns are the interior nodes;
// the boundary carries zero data. Second derivatives are taken along the axes
// and (n = 2) the two diagonals, with Shortley-Weller arms cut at the exact
// boundary; the mixed derivative is half the difference of the diagonal ones.
class Discretization {
 public:
  // Slots of a stencil weight vector.
  enum Quantity { xx = 0, yy = 1, xy = 2, gx = 3, gy = 4 };

  struct Entry {
    int node = -1;
    std::array<double, 5> w{};
  };
  struct Stencil {
    std::vector<Entry> entries;  // entries[0] is the centre node
    bool full = true;            // no arm was cut by the boundary
  };

  Discretization(const GraphDomain& domain, double h);

  int n() const { return domain_.n(); }
  double h() const { return h_; }
  const GraphDomain& domain() const { return domain_; }
  int size() const { return static_cast<int>(coords_.size()); }
  const Vec2& coord(int i) const { return coords_[i]; }
  const std::vector<Vec2>& coords() const { return coords_; }
  const Stencil& stencil(int i) const { return stencils_[i]; }
  // Points where grid lines cross the boundary.
  const std::vector<Vec2>& boundary_points() const { return boundary_; }
  // Bounding grid (planar, z = 0) and unknown index per grid node (-1 if none).
  const GridSpec& grid() const { return grid_; }
  int unknown_at(int i, int j) const { return node_of_[grid_.index(i, j)]; }

  Eigen::VectorXd sample(const ScalarField& f) const;
  Eigen::Matrix2d hessian(const Eigen::VectorXd& f, int i) const;
  Eigen::Vector2d gradient(const Eigen::VectorXd& f, int i) const;

 private:
  GraphDomain domain_;
  double h_;
  GridSpec grid_;
  std::vector<int> node_of_;
  std::vector<Vec2> coords_;
  std::vector<Stencil> stencils_;
  std::vector<Vec2> boundary_;
};

struct GraphProblem {
  int n = 2;
  GraphDomain domain;
  double h = 1.0 / 32;
  ScalarField phi;            // positive
  GradientWeight G = GradientWeight::g0(2);
  ScalarField barrier;        // strictly convex, zero on the boundary
  double tol = -1.0;          // < 0 means 1e-8 for n = 1, 1e-6 for n = 2

  double resolved_tol() const { return tol > 0 ? tol : (n == 1 ? 1e-8 : 1e-6); }
};

struct SolveOptions {
  double tol = -1.0;          // overrides the problem tolerance when > 0
  int max_newton = 50;
  double damping_floor = 0x1p-20;
  double alpha = 0.5;         // start from alpha * barrier
  double t_step = 1.0 / 16;
  double min_t_step = 0x1p-12;
  double softmax_sharpness = 1e3;
  // Stop the continuation at this path parameter (1 solves the problem).
  double t_final = 1.0;
  // Reuse this discretization instead of building one from the problem.
  std::shared_ptr<const Discretization> discretization;
};

struct SolutionDiagnostics {
  double sup_f = 0.0;
  double sup_grad = 0.0;
  double sup_hess = 0.0;
  double pogorelov = 0.0;       // sup |f| * ||D^2 f||
  double asymmetry = 0.0;       // Hessians are symmetric by construction
  double residual_norm = 0.0;
  double tol = 0.0;
  double barrier_margin = 0.0;  // delta(f_hat) on the grid
  double min_barrier_gap = 0.0; // min over the path of f - f_hat
  int newton_iterations = 0;
  std::vector<double> t_path;
  double delta0 = 0.0, delta1 = 0.0, eps = 0.0;
};

struct GraphSolution {
  std::shared_ptr<const Discretization> disc;
  Eigen::VectorXd f;
  Eigen::VectorXd residual;
  std::vector<Eigen::Matrix2d> hessian;  // n = 1 uses the (0, 0) entry
  std::vector<Eigen::Vector2d> gradient;
  Eigen::VectorXd lambda_max;
  SolutionDiagnostics diag;

  // Values on the bounding grid: 0 on boundary-adjacent non-unknowns inside
  // the closed domain, NaN outside.
  GridField to_grid_field() const;
};

struct LinearizedOperator {
  std::vector<Eigen::Matrix2d> B;        // (1/n) F(D^2 f) (D^2 f)^{-1}
  std::vector<Eigen::Vector2d> b;        // -phi DG(Df)
  Eigen::VectorXd Lambda;                // trace B
  Eigen::SparseMatrix<double> matrix;    // action on interior values
};

// Hessians, gradients and residual F(D^2 f) - phi G(Df) of nodal values f.
GraphSolution evaluate_solution(std::shared_ptr<const Discretization> disc, Eigen::VectorXd f,
                                const ScalarField& phi, const GradientWeight& G);

// Curvature of the discrete graph at unknown `node`; throws for nodes whose
// stencil is cut by the boundary.
double gaussian_curvature_of_graph(const GraphSolution& sol, int node);

LinearizedOperator assemble_linearization(const GraphSolution& sol, const GraphProblem& prob);

// Grid margin min(F(D^2 f_hat) - phi G(D f_hat)); throws when a barrier
// Hessian is not positive definite.
double barrier_margin(const Discretization& disc, const GraphProblem& prob);

GraphSolution solve_dirichlet(const GraphProblem& prob, const SolveOptions& opts = {});

struct BoundsReport {
  double sup_f = 0.0, sup_barrier = 0.0;
  double sup_grad = 0.0, sup_barrier_grad = 0.0;
  double pogorelov = 0.0;
  double max_f = 0.0;
  bool c0 = false;               // sup|f| <= sup|f_hat|
  bool c1 = false;               // sup|Df| <= sup|D f_hat|
  bool pogorelov_finite = false;
  bool max_on_boundary = false;  // f <= 0 at every node
  bool ok() const { return c0 && c1 && pogorelov_finite && max_on_boundary; }
};

BoundsReport verify_bounds(const GraphSolution& sol, const GraphProblem& prob);

// Relative spread (max - min) / max of Pogorelov values over refinements.
double pogorelov_spread(std::span<const double> values);

// Auto-cap lower barrier: scale * (sqrt(R^2 - r^2) - sqrt(R^2 - |x - c|^2))
// for a disk or interval of radius r, with R = max(0.8 / phi_max, 1.05 r).
ScalarField auto_cap_barrier(const GraphDomain& domain, double phi_max, double scale = 1.0);

double holder_seminorm(const GraphSolution& sol, double alpha, std::int64_t sample_pairs, std::uint64_t seed = 0);

}  // namespace kplateau
