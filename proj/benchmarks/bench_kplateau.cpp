#include <cmath>
#include <random>

#include <benchmark/benchmark.h>

#include "kplateau/barrier.hpp"
#include "kplateau/convex_kernel.hpp"
#include "kplateau/ma_solver.hpp"
#include "kplateau/plateau.hpp"
#include "kplateau/shapes.hpp"
#include "kplateau/spherical.hpp"

using namespace kplateau;

namespace {

std::vector<Point> cloud(int dim, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<Point> p;
  for (int i = 0; i < n; ++i) p.emplace_back(g(rng), g(rng), dim == 3 ? g(rng) : 0.0);
  return p;
}

void BM_hull_2d(benchmark::State& st) {
  const auto p = cloud(2, static_cast<int>(st.range(0)), 1);
  for (auto _ : st) benchmark::DoNotOptimize(convex_hull(2, p));
  st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_hull_2d)->RangeMultiplier(4)->Range(256, 65536)->Complexity();

void BM_hull_3d(benchmark::State& st) {
  const auto p = cloud(3, static_cast<int>(st.range(0)), 2);
  for (auto _ : st) benchmark::DoNotOptimize(convex_hull(3, p));
  st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_hull_3d)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

void BM_signed_distance_ball(benchmark::State& st) {
  const ConvexBody b = ball(static_cast<int>(st.range(0)));
  const auto q = cloud(3, 1024, 3);
  std::size_t i = 0;
  for (auto _ : st) benchmark::DoNotOptimize(b.signed_distance(q[i++ % q.size()]));
}
BENCHMARK(BM_signed_distance_ball)->DenseRange(3, 5);

void BM_hausdorff_ball(benchmark::State& st) {
  const ConvexBody a = ball(4), b = ball(4, 1.1);
  for (auto _ : st) benchmark::DoNotOptimize(hausdorff_distance(a, b));
}
BENCHMARK(BM_hausdorff_ball)->Unit(benchmark::kMillisecond);

void BM_supporting_normals_corner(benchmark::State& st) {
  const ConvexBody sq = box(2, Vec3(-1, -1, 0), Vec3(1, 1, 0));
  for (auto _ : st) benchmark::DoNotOptimize(supporting_normals(sq, Point(1, 1, 0)));
}
BENCHMARK(BM_supporting_normals_corner);

void BM_dual_set(benchmark::State& st) {
  DirectionSet x(2, DirectionKind::generic);
  for (int i = 0; i < 20; ++i) {
    const double a = 0.05 * i;
    x.add(Vec3(std::cos(a), std::sin(a), 0));
  }
  const SphericalSet s(x);
  for (auto _ : st) benchmark::DoNotOptimize(dual_set(s));
}
BENCHMARK(BM_dual_set);

void BM_solve_cap(benchmark::State& st) {
  GraphProblem p;
  p.domain = GraphDomain::disk(Vec2::Zero(), 1.0);
  p.h = 1.0 / static_cast<double>(st.range(0));
  p.phi = [](const Vec2&) { return 0.5; };
  p.barrier = auto_cap_barrier(p.domain, 0.5);
  for (auto _ : st) benchmark::DoNotOptimize(solve_dirichlet(p));
}
BENCHMARK(BM_solve_cap)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_smooth_intersection(benchmark::State& st) {
  const ConvexBody d1 = disk(1024, 1.0, Point(-0.3, 0, 0)), d2 = disk(1024, 1.0, Point(0.3, 0, 0));
  for (auto _ : st) benchmark::DoNotOptimize(smooth_intersection(d1, d2, 1.0, 0.1));
}
BENCHMARK(BM_smooth_intersection)->Unit(benchmark::kMillisecond);

void BM_plateau_disk(benchmark::State& st) {
  const ConvexBody K = disk(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(solve_plateau(K, FrozenSet::lower_half(K), 0.5));
}
BENCHMARK(BM_plateau_disk)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
