#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace kplateau {

// Every point and direction is stored in R^3. Planar (dim == 2) geometry lives
// in the z = 0 plane; the "last coordinate" of a planar direction is y.
using Vec3 = Eigen::Vector3d;
using Point = Eigen::Vector3d;

// Precondition violations on geometric inputs.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Numerical procedures that did not reach their stated goal.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw DomainError(what);
}

inline void check_dim(int dim) { require(dim == 2 || dim == 3, "ambient dimension must be 2 or 3"); }

}  // namespace kplateau
