#include "kplateau/grid.hpp"

#include <algorithm>
#include <cmath>

namespace kplateau {

GridSpec make_grid(int dim, const Vec3& lo, const Vec3& hi, double h, double margin) {
  check_dim(dim);
  require(h > 0, "grid spacing must be positive");
  GridSpec g;
  g.dim = dim;
  g.spacing = h;
  g.origin = lo - Vec3::Constant(margin);
  if (dim == 2) g.origin.z() = 0.0;
  for (int a = 0; a < dim; ++a) g.shape[a] = static_cast<int>(std::ceil((hi[a] - lo[a] + 2 * margin) / h)) + 1;
  g.shape[2] = dim == 3 ? g.shape[2] : 1;
  return g;
}

double GridField::sample(const Point& x) const {
  const auto& s = spec;
  double w[3][2];
  int base[3];
  for (int a = 0; a < 3; ++a) {
    if (s.shape[a] == 1 || (a == 2 && s.dim == 2)) {
      base[a] = 0;
      w[a][0] = 1.0;
      w[a][1] = 0.0;
      continue;
    }
    const double u = std::clamp((x[a] - s.origin[a]) / s.spacing, 0.0, double(s.shape[a] - 1));
    base[a] = std::min(static_cast<int>(u), s.shape[a] - 2);
    const double t = u - base[a];
    w[a][0] = 1.0 - t;
    w[a][1] = t;
  }
  double v = 0.0;
  for (int di = 0; di < 2; ++di)
    for (int dj = 0; dj < 2; ++dj)
      for (int dk = 0; dk < 2; ++dk) {
        const double ww = w[0][di] * w[1][dj] * w[2][dk];
        if (ww == 0.0) continue;
        v += ww * at(base[0] + di, base[1] + dj, base[2] + dk);
      }
  return v;
}

}  // namespace kplateau
