#pragma once

#include <span>
#include <vector>

#include "kplateau/types.hpp"

namespace kplateau {

struct MinNormResult {
  Vec3 point = Vec3::Zero();
  std::vector<int> support;     // active generators
  std::vector<double> weights;  // convex weights over support
};

// Wolfe's algorithm for the point of conv(pts) nearest the origin.
MinNormResult min_norm_point(std::span<const Vec3> pts, double tol = 1e-12);

}  // namespace kplateau
