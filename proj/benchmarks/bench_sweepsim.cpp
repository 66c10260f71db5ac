// Microbenchmarks for the hot paths: forward path generation, the backward
// coalescent pass, Yule forest draws, and the analytic kernels.

#include <benchmark/benchmark.h>

#include "sweepsim/analytics.hpp"
#include "sweepsim/frequency_path.hpp"
#include "sweepsim/rng.hpp"
#include "sweepsim/structured_coalescent.hpp"
#include "sweepsim/yule.hpp"

namespace {

using namespace sweepsim;

SweepParams bench_params(double theta, double rho) {
  return SweepParams::with_rho(1000.0, theta, rho, 10'000, 2, 7);
}

void BM_WfPath(benchmark::State& state) {
  const SweepParams p = bench_params(state.range(0) / 10.0, 0.0);
  std::uint64_t rep = 0;
  for (auto _ : state) {
    auto rng = make_stream(p.seed, 0, rep++);
    benchmark::DoNotOptimize(simulate_wf_path(p, rng));
  }
}
BENCHMARK(BM_WfPath)->Arg(0)->Arg(1)->Arg(10);

void BM_DiffusionPath(benchmark::State& state) {
  const SweepParams p = bench_params(1.0, 0.0);
  std::uint64_t rep = 0;
  for (auto _ : state) {
    auto rng = make_stream(p.seed, 1, rep++);
    benchmark::DoNotOptimize(simulate_diffusion_path(p, 0.0, rng));
  }
}
BENCHMARK(BM_DiffusionPath);

void BM_BackwardPass(benchmark::State& state) {
  const SweepParams p = bench_params(1.0, 10.0);
  auto path_rng = make_stream(p.seed, 2, 0);
  const FrequencyPath path = simulate_wf_path(p, path_rng);
  std::uint64_t rep = 0;
  for (auto _ : state) {
    auto rng = make_stream(p.seed, 3, rep++);
    benchmark::DoNotOptimize(run_backward(path, p, RatesMode::kFull, rng));
  }
}
BENCHMARK(BM_BackwardPass);

void BM_YuleDraw(benchmark::State& state) {
  const SweepParams p = bench_params(1.0, 10.0);
  const MarkingModel marking(2000, p.gamma, p.theta, p.alpha);
  std::uint64_t rep = 0;
  for (auto _ : state) {
    auto rng = make_stream(p.seed, 4, rep++);
    YuleForest forest = grow_forest(p.alpha, p.theta, rng);
    benchmark::DoNotOptimize(sample_and_mark(forest, 2, marking, rng));
  }
}
BENCHMARK(BM_YuleDraw);

void BM_HetRatioYule(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(het_ratio_yule(1000.0, 0.1, 0.069));
  }
}
BENCHMARK(BM_HetRatioYule);

void BM_PairPartitionExact(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(pair_partition_prob_exact(1000.0, 0.1, 0.069));
  }
}
BENCHMARK(BM_PairPartitionExact);

void BM_GreenDensity(benchmark::State& state) {
  const GreenFnContext ctx{200.0, 0.5};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        green_density(GreenKind::kConditioned, 0.3, 0.0, ctx));
  }
}
BENCHMARK(BM_GreenDensity);

}  // namespace

BENCHMARK_MAIN();
