#include <benchmark/benchmark.h>

#include "dipolefield/geometry.hpp"
#include "dipolefield/limit_dist.hpp"
#include "dipolefield/montecarlo.hpp"

using namespace dipolefield;

namespace {

// One realization of N dipoles; items are dipoles.
void BM_SampleRealization(benchmark::State& state) {
  SimulationSpec spec;
  spec.n_dipoles = static_cast<std::uint64_t>(state.range(0));
  spec.mode = state.range(1) == 0 ? OrientationMode::kParallelZ : OrientationMode::kRandomIsotropic;
  PhiloxStream rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(sample_realization(spec, rng));
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.SetLabel(std::string(to_string(spec.mode)));
}
BENCHMARK(BM_SampleRealization)->Args({10000, 0})->Args({10000, 1});

void BM_PhiloxUniform(benchmark::State& state) {
  PhiloxStream rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(rng.uniform_open());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PhiloxUniform);

void BM_CharfnSingle(benchmark::State& state) {
  const auto& geo = geometry_for(OrientationMode::kParallelZ);
  const double k = static_cast<double>(state.range(0)) / 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(charfn_single(k, geo));
}
BENCHMARK(BM_CharfnSingle)->Arg(1)->Arg(10)->Arg(100);

void BM_CharfnExcluded(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(charfn_excluded(1.3, 1.0, OrientationMode::kParallelZ));
}
BENCHMARK(BM_CharfnExcluded);

void BM_InvertExcluded(benchmark::State& state) {
  const double eps = static_cast<double>(state.range(0)) / 10.0;
  const auto mode = OrientationMode::kParallelZ;
  const auto grid = default_curve_grid(mode, eps);
  for (auto _ : state) benchmark::DoNotOptimize(analytic_curve(mode, eps, grid));
}
BENCHMARK(BM_InvertExcluded)->Arg(4)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_GeometryRandomQuadrature(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(geometry_factor_random(1.5));
}
BENCHMARK(BM_GeometryRandomQuadrature)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
