#include "kplateau/monge_ampere.hpp"

#include <cmath>
#include <random>

namespace kplateau {

FValue F_value_and_derivative(const Eigen::MatrixXd& a) {
  require(a.rows() == a.cols() && a.rows() >= 1, "F needs a square matrix");
  const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(sym);
  if (llt.info() != Eigen::Success) throw DomainError("outside cone Gamma");
  const int n = static_cast<int>(a.rows());
  const auto& l = llt.matrixL();
  double logdet = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = l(i, i);
    if (!(d > 0)) throw DomainError("outside cone Gamma");
    logdet += 2.0 * std::log(d);
  }
  FValue out;
  out.F = std::exp(logdet / n);
  out.DF = (out.F / n) * llt.solve(Eigen::MatrixXd::Identity(n, n));
  return out;
}

double graph_curvature(const Eigen::MatrixXd& hess, const Eigen::VectorXd& grad) {
  const int n = static_cast<int>(grad.size());
  return hess.determinant() / std::pow(1.0 + grad.squaredNorm(), 0.5 * (n + 2));
}

double gaussian_curvature_of_graph(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h) {
  const int n = static_cast<int>(x.size());
  Eigen::VectorXd g(n);
  Eigen::MatrixXd H(n, n);
  const double f0 = f(x);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e(i) = h;
    const double fp = f(x + e), fm = f(x - e);
    g(i) = (fp - fm) / (2 * h);
    H(i, i) = (fp - 2 * f0 + fm) / (h * h);
    for (int j = 0; j < i; ++j) {
      Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
      d(j) = h;
      H(i, j) = H(j, i) = (f(x + e + d) - f(x + e - d) - f(x - e + d) + f(x - e - d)) / (4 * h * h);
    }
  }
  return graph_curvature(H, g);
}

double GradientWeight::value(const Eigen::VectorXd& xi) const {
  if (kind_ == Kind::one) return 1.0;
  return std::pow(1.0 + xi.squaredNorm(), (n_ + 2.0) / (2.0 * n_));
}

Eigen::VectorXd GradientWeight::gradient(const Eigen::VectorXd& xi) const {
  if (kind_ == Kind::one) return Eigen::VectorXd::Zero(xi.size());
  const double e = (n_ + 2.0) / (2.0 * n_);
  return (2.0 * e * std::pow(1.0 + xi.squaredNorm(), e - 1.0)) * xi;
}

double phi_for_curvature(double k) {
  require(k > 0, "curvature target must be positive");
  return std::sqrt(k);
}

double holder_seminorm(std::span<const Eigen::Vector2d> x, std::span<const double> v, double alpha,
                       std::int64_t sample_pairs, std::uint64_t seed) {
  if (!(alpha > 0 && alpha <= 1)) throw DomainError("Hoelder exponent must lie in (0, 1]");
  require(x.size() == v.size(), "coordinate and value counts differ");
  const std::int64_t n = static_cast<std::int64_t>(x.size());
  double best = 0.0;
  auto quotient = [&](std::int64_t i, std::int64_t j) {
    const double d = (x[i] - x[j]).norm();
    if (d <= 0) return;
    best = std::max(best, std::abs(v[i] - v[j]) / std::pow(d, alpha));
  };
  if (sample_pairs >= n * (n - 1) / 2) {
    for (std::int64_t i = 0; i < n; ++i)
      for (std::int64_t j = i + 1; j < n; ++j) quotient(i, j);
    return best;
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> pick(0, n - 1);
  for (std::int64_t s = 0; s < sample_pairs; ++s) quotient(pick(rng), pick(rng));
  return best;
}

}  // namespace kplateau
