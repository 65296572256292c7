#include "kplateau/min_norm_point.hpp"

#include <Eigen/Dense>

#include <algorithm>

namespace kplateau {

namespace {

// Minimiser of |sum mu_i p_i| over the affine hull (sum mu = 1).
Eigen::VectorXd affine_min(std::span<const Vec3> pts, const std::vector<int>& s) {
  const int m = static_cast<int>(s.size());
  Eigen::MatrixXd a(m + 1, m + 1);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m + 1);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) a(i, j) = pts[s[i]].dot(pts[s[j]]);
    a(i, m) = 1.0;
    a(m, i) = 1.0;
  }
  a(m, m) = 0.0;
  b(m) = 1.0;
  return a.completeOrthogonalDecomposition().solve(b).head(m);
}

}  // namespace

MinNormResult min_norm_point(std::span<const Vec3> pts, double tol) {
  require(!pts.empty(), "min-norm point of an empty set");
  double scale = 0;
  int first = 0;
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
    scale = std::max(scale, pts[i].squaredNorm());
    if (pts[i].squaredNorm() < pts[first].squaredNorm()) first = i;
  }
  std::vector<int> s{first};
  std::vector<double> lam{1.0};
  Vec3 x = pts[first];

  for (int outer = 0; outer < 1000; ++outer) {
    int j = 0;
    double best = x.dot(pts[0]);
    for (int i = 1; i < static_cast<int>(pts.size()); ++i) {
      const double v = x.dot(pts[i]);
      if (v < best) best = v, j = i;
    }
    if (x.squaredNorm() - best <= tol * scale) break;
    if (std::find(s.begin(), s.end(), j) != s.end()) break;
    s.push_back(j);
    lam.push_back(0.0);

    for (int inner = 0; inner < 100; ++inner) {
      const Eigen::VectorXd mu = affine_min(pts, s);
      if ((mu.array() > tol).all()) {
        lam.assign(mu.data(), mu.data() + mu.size());
        break;
      }
      double theta = 1.0;
      for (std::size_t i = 0; i < s.size(); ++i)
        if (mu(i) <= tol) theta = std::min(theta, lam[i] / (lam[i] - mu(i)));
      std::vector<int> s2;
      std::vector<double> l2;
      for (std::size_t i = 0; i < s.size(); ++i) {
        const double v = lam[i] + theta * (mu(i) - lam[i]);
        if (v > tol) s2.push_back(s[i]), l2.push_back(v);
      }
      if (s2.empty()) {  // numerical corner: keep the best single point
        s2 = {j};
        l2 = {1.0};
      }
      s.swap(s2);
      lam.swap(l2);
    }
    double tot = 0;
    for (double l : lam) tot += l;
    x.setZero();
    for (std::size_t i = 0; i < s.size(); ++i) {
      lam[i] /= tot;
      x += lam[i] * pts[s[i]];
    }
  }
  return {x, s, lam};
}

}  // namespace kplateau
