#include "kplateau/direction_grid.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <unordered_map>

namespace kplateau {

namespace {

constexpr double kPi = std::numbers::pi;

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace

Icosphere make_icosphere(int subdivisions) {
  require(subdivisions >= 0 && subdivisions <= 8, "icosphere subdivision out of range");
  const double p = (1.0 + std::sqrt(5.0)) / 2.0;
  Icosphere ico;
  ico.vertices = {{-1, p, 0}, {1, p, 0}, {-1, -p, 0}, {1, -p, 0}, {0, -1, p}, {0, 1, p},
                  {0, -1, -p}, {0, 1, -p}, {p, 0, -1}, {p, 0, 1}, {-p, 0, -1}, {-p, 0, 1}};
  ico.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
               {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
               {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  // Rotate vertex 5 = (0, 1, p) onto +e3 so the poles are grid points.
  const Eigen::Quaterniond q = Eigen::Quaterniond::FromTwoVectors(Vec3(0, 1, p).normalized(), Vec3::UnitZ());
  for (auto& v : ico.vertices) v = (q * v.normalized()).normalized();
  ico.vertices[5] = Vec3::UnitZ();
  ico.vertices[6] = -Vec3::UnitZ();

  for (int level = 0; level < subdivisions; ++level) {
    std::unordered_map<std::uint64_t, int> midpoint;
    std::vector<std::array<int, 3>> faces;
    faces.reserve(ico.faces.size() * 4);
    auto mid = [&](int a, int b) {
      auto [it, inserted] = midpoint.try_emplace(edge_key(a, b), static_cast<int>(ico.vertices.size()));
      if (inserted) ico.vertices.push_back((ico.vertices[a] + ico.vertices[b]).normalized());
      return it->second;
    };
    for (const auto& f : ico.faces) {
      const int ab = mid(f[0], f[1]);
      const int bc = mid(f[1], f[2]);
      const int ca = mid(f[2], f[0]);
      faces.push_back({f[0], ab, ca});
      faces.push_back({f[1], bc, ab});
      faces.push_back({f[2], ca, bc});
      faces.push_back({ab, bc, ca});
    }
    ico.faces = std::move(faces);
  }
  return ico;
}

int icosphere_level(double angular_res) {
  require(angular_res > 0, "angular resolution must be positive");
  const double base = std::atan(2.0);  // icosahedron edge angle
  int level = 0;
  while (level < 8 && base / std::ldexp(1.0, level) > angular_res * (1.0 + 1e-9)) ++level;
  return level;
}

double grid_spacing(int dim, double angular_res) {
  check_dim(dim);
  if (dim == 2) {
    const int quarter = std::max(1, static_cast<int>(std::ceil(kPi / 2 / angular_res - 1e-9)));
    return kPi / 2 / quarter;
  }
  return std::atan(2.0) / std::ldexp(1.0, icosphere_level(angular_res));
}

const std::vector<Vec3>& sphere_directions(int dim, double angular_res) {
  check_dim(dim);
  require(angular_res > 0, "angular resolution must be positive");
  static std::mutex mutex;
  static std::map<std::pair<int, long long>, std::unique_ptr<std::vector<Vec3>>> cache;

  const std::lock_guard<std::mutex> lock(mutex);
  int count = 0;
  if (dim == 2) count = 4 * std::max(1, static_cast<int>(std::ceil(kPi / 2 / angular_res - 1e-9)));
  else count = icosphere_level(angular_res);
  auto& slot = cache[{dim, count}];
  if (!slot) {
    auto dirs = std::make_unique<std::vector<Vec3>>();
    if (dim == 2) {
      dirs->reserve(count);
      for (int i = 0; i < count; ++i) {
        const double a = 2 * kPi * i / count;
        Vec3 u(std::cos(a), std::sin(a), 0.0);
        // exact axis directions
        if (i % (count / 4) == 0) u = Vec3(std::round(u.x()), std::round(u.y()), 0.0);
        dirs->push_back(u);
      }
    } else {
      *dirs = make_icosphere(count).vertices;
    }
    slot = std::move(dirs);
  }
  return *slot;
}

double angle_between(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

}  // namespace kplateau
