#pragma once

#include <array>
#include <vector>

#include "kplateau/types.hpp"

namespace kplateau {

struct Icosphere {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
};

// Icosphere with a vertex at +e3 (and -e3), refined `subdivisions` times.
Icosphere make_icosphere(int subdivisions);

// Smallest subdivision level whose edge angle is at most `angular_res` radians.
int icosphere_level(double angular_res);

// Shared, immutable discretization of the unit circle (dim 2: uniform angles,
// always containing +-e1 and +-e2) or the unit sphere (dim 3: icosphere).
// The returned reference stays valid for the life of the process.
const std::vector<Vec3>& sphere_directions(int dim, double angular_res);

// Spacing of the grid returned by sphere_directions.
double grid_spacing(int dim, double angular_res);

// Angle between unit vectors, robust near 0 and pi.
double angle_between(const Vec3& a, const Vec3& b);

}  // namespace kplateau
