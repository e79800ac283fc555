#include <benchmark/benchmark.h>

#include <torsion_forge/lens.hpp>

namespace tf = torsion_forge;

static void BM_LensInvariant(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(tf::lens_invariant(p, 1, 1, 1).invariant);
}
BENCHMARK(BM_LensInvariant)->Arg(5)->Arg(12)->Arg(24)->Unit(benchmark::kMicrosecond);

static void BM_SubdividedInvariant(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const tf::LiftedTriangulation sub = tf::subdivided_lens(tf::lens_cover_triangulation(p, 1));
  const tf::Representation rep = tf::rho_k(p, 1);
  for (auto _ : state) benchmark::DoNotOptimize(tf::invariant(sub, rep, 1).invariant);
}
BENCHMARK(BM_SubdividedInvariant)->Arg(3)->Arg(7)->Unit(benchmark::kMillisecond);

static void BM_ModifiedInvariants(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(tf::modified_invariants(p, 1).product);
}
BENCHMARK(BM_ModifiedInvariants)->Arg(3)->Arg(5)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_DihedralJacobian(benchmark::State& state) {
  const tf::Lengths6 l{1.0, 1.1, 0.9, 1.2, 1.05, 0.95};
  for (auto _ : state) benchmark::DoNotOptimize(tf::dihedral_jacobian(l));
}
BENCHMARK(BM_DihedralJacobian);

static void BM_RandomMoves(benchmark::State& state) {
  const tf::LiftedTriangulation lt = tf::lens_triangulation(7, 2);
  const tf::Representation rep = tf::rho_k(7, 1);
  const std::vector<tf::MoveKind> kinds = {tf::MoveKind::TwoThree, tf::MoveKind::ThreeTwo};
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(tf::random_moves(lt, rep, kinds, 4, seed++).tri.tet_count());
}
BENCHMARK(BM_RandomMoves)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
