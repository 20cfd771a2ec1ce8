#include <skewdirac/exact.hpp>
#include <skewdirac/inverse.hpp>
#include <skewdirac/propagator.hpp>
#include <skewdirac/random_potential.hpp>
#include <skewdirac/snode.hpp>
#include <skewdirac/weyl.hpp>

#include <benchmark/benchmark.h>

using namespace skewdirac;

namespace {

PotentialGrid smooth_grid(int n, int m1, int m2) {
  std::mt19937_64 rng(5);
  return PotentialGrid::from_function(m1, m2, 1.0, n, random_smooth_potential(rng, m1, m2, 1.0, 1.0), 1.0);
}

void BM_Propagate(benchmark::State& state) {
  const auto g = smooth_grid(static_cast<int>(state.range(0)), 2, 2);
  for (auto _ : state) benchmark::DoNotOptimize(propagate(g, g.cells(), cplx(1.0, 3.0)));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Propagate)->RangeMultiplier(2)->Range(100, 1600)->Complexity();

void BM_WeylFunction(benchmark::State& state) {
  const auto g = smooth_grid(static_cast<int>(state.range(0)), 2, 1);
  for (auto _ : state) benchmark::DoNotOptimize(weyl_function(g, cplx(0.5, 4.0), 1e-12));
}
BENCHMARK(BM_WeylFunction)->RangeMultiplier(2)->Range(100, 1600);

void BM_WeylMember(benchmark::State& state) {
  const auto g = smooth_grid(static_cast<int>(state.range(0)), 2, 1);
  for (auto _ : state) benchmark::DoNotOptimize(weyl_member(g, cplx(0.5, 2.0), -1, Continuation::constant));
}
BENCHMARK(BM_WeylMember)->RangeMultiplier(2)->Range(100, 1600);

void BM_SKernel(benchmark::State& state) {
  const Phi1Profile p = scalar_constant_profile(0.5, 1.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(s_kernel(p));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SKernel)->RangeMultiplier(2)->Range(100, 800)->Complexity();

void BM_RecoverBeta(benchmark::State& state) {
  const Phi1Profile p = scalar_constant_profile(0.5, 1.0, static_cast<int>(state.range(0)));
  const SKernel s = s_kernel(p);
  for (auto _ : state) benchmark::DoNotOptimize(recover_beta(p, s));
}
BENCHMARK(BM_RecoverBeta)->RangeMultiplier(2)->Range(100, 800);

void BM_RecoverPhi1(benchmark::State& state) {
  const auto g = PotentialGrid::constant(1.0, 200, CMatrix::Constant(1, 1, 0.5));
  const WeylLineData data = synthesize_line_data(g, 1.5, static_cast<double>(state.range(0)), 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(recover_phi1(data, 1.0, 200));
}
BENCHMARK(BM_RecoverPhi1)->Arg(50)->Arg(100)->Arg(200);

}  // namespace

BENCHMARK_MAIN();
