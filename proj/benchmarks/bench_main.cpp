#include <benchmark/benchmark.h>

#include "smoothsgd/certifier.hpp"
#include "smoothsgd/optimizer.hpp"
#include "smoothsgd/smoothing.hpp"

using namespace smoothsgd;

static void BM_Philox(benchmark::State& state) {
  RngStream rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(rng.next_u64());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Philox);

static void BM_BallSample(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const NoiseKernel k(NoiseKind::uniform_ball, 1.0, d);
  RngStream rng(2, 0);
  Point w(d);
  for (auto _ : state) {
    k.sample_unchecked(rng, w);
    benchmark::DoNotOptimize(w.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_BallSample)->Arg(1)->Arg(3)->Arg(10);

static void BM_SgdSteps(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const Objective f = make_spiky({1.0, 1.0, 10.0, d});
  const auto s = StepSchedule::constant(0.01, 10'000, NoiseKernel(NoiseKind::uniform_ball, 30.0, d));
  const Point x0(d, 1.0);
  for (auto _ : state) {
    RngStream rng(3, 0);
    benchmark::DoNotOptimize(sgd_run(f, s, x0, rng).size());
  }
  state.SetItemsProcessed(state.iterations() * 10'000);
}
BENCHMARK(BM_SgdSteps)->Arg(1)->Arg(4);

static void BM_SmoothedGradient(benchmark::State& state) {
  const Objective f = make_spiky({});
  const NoiseKernel k(NoiseKind::uniform_ball, 7000.0, 1);
  const auto n = static_cast<std::uint64_t>(state.range(0));
  RngStream rng(4, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(smoothed_grad_mc(f, k, 4.4e-5, Point{0.7}, n, rng).mean[0]);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_SmoothedGradient)->Arg(10'000)->Arg(1'000'000);

static void BM_RegionScan(benchmark::State& state) {
  const Objective f = make_spiky({});
  const NoiseKernel k(NoiseKind::uniform_ball, 7000.0, 1);
  const auto grid = cell_centered_grid(1, -3, 3, 30);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        region_scan(f, k, 4.4e-5, Point{0.0}, grid, 0.5, 10'000, RngStream(5, 0)).certified_c);
  }
}
BENCHMARK(BM_RegionScan);
BENCHMARK_MAIN();
