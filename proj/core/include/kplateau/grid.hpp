#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "kplateau/types.hpp"

namespace kplateau {

// Regular node grid; planar grids have shape[2] == 1 and z = origin.z().
struct GridSpec {
  int dim = 2;
  Vec3 origin = Vec3::Zero();
  double spacing = 1.0;
  std::array<int, 3> shape{1, 1, 1};

  std::size_t size() const { return std::size_t(shape[0]) * shape[1] * shape[2]; }
  std::size_t index(int i, int j, int k = 0) const { return (std::size_t(i) * shape[1] + j) * shape[2] + k; }
  Point node(int i, int j, int k = 0) const {
    return origin + spacing * Vec3(i, j, dim == 3 ? k : 0);
  }
  bool inside(int i, int j, int k = 0) const {
    return i >= 0 && j >= 0 && k >= 0 && i < shape[0] && j < shape[1] && k < shape[2];
  }
};

// Bounding-box grid covering [lo, hi] padded by `margin`, spacing h.
GridSpec make_grid(int dim, const Vec3& lo, const Vec3& hi, double h, double margin);

// Scalar field on a GridSpec, row-major (i slowest).
struct GridField {
  GridSpec spec;
  std::vector<double> values;

  GridField() = default;
  explicit GridField(GridSpec s, double fill = 0.0) : spec(s), values(s.size(), fill) {}

  double& at(int i, int j, int k = 0) { return values[spec.index(i, j, k)]; }
  double at(int i, int j, int k = 0) const { return values[spec.index(i, j, k)]; }

  // Multilinear interpolation; clamps to the grid box.
  double sample(const Point& x) const;
};

}  // namespace kplateau
