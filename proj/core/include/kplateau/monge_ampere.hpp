#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "kplateau/types.hpp"

namespace kplateau {

// F(A) = det(A)^{1/n} and DF(A) = (1/n) F(A) A^{-1} on positive-definite A.
struct FValue {
  double F = 0.0;
  Eigen::MatrixXd DF;
};

FValue F_value_and_derivative(const Eigen::MatrixXd& a);

// Gauss curvature of a graph: det(D^2 f) / (1 + |Df|^2)^{(n+2)/2}.
double graph_curvature(const Eigen::MatrixXd& hess, const Eigen::VectorXd& grad);

// Curvature of a closed-form function at x by central differences of step h.
double gaussian_curvature_of_graph(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h = 1e-4);

// Gradient weight G(xi) >= 1.
class GradientWeight {
 public:
  enum class Kind { one, g0 };

  GradientWeight() = default;
  GradientWeight(Kind kind, int n) : kind_(kind), n_(n) {}
  static GradientWeight one(int n) { return {Kind::one, n}; }
  // (1 + |xi|^2)^{(n+2)/(2n)}
  static GradientWeight g0(int n) { return {Kind::g0, n}; }

  Kind kind() const { return kind_; }
  int n() const { return n_; }
  double value(const Eigen::VectorXd& xi) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& xi) const;

 private:
  Kind kind_ = Kind::g0;
  int n_ = 2;
};

// Target right-hand side for "Gauss curvature k" in the sense that the
// solution is a piece of the sphere (circle) of radius 1/sqrt(k): F/G0 = sqrt(k).
double phi_for_curvature(double k);

// [f]_alpha over node pairs. All pairs when sample_pairs covers them,
// otherwise a seeded random sample.
double holder_seminorm(std::span<const Eigen::Vector2d> x, std::span<const double> v, double alpha,
                       std::int64_t sample_pairs, std::uint64_t seed = 0);

}  // namespace kplateau
