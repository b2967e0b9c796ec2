#include <benchmark/benchmark.h>

#include "cuesum/eig_density.hpp"
#include "cuesum/finite_size.hpp"
#include "cuesum/monte_carlo.hpp"
#include "cuesum/quaternion.hpp"
#include "cuesum/sv_density.hpp"

using namespace cuesum;

static void BM_SolveAddition(benchmark::State& state) {
  const auto w = equal_weights(static_cast<int>(state.range(0)), 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(solve_addition(complex(0.4), w));
}
BENCHMARK(BM_SolveAddition)->Arg(2)->Arg(4)->Arg(8);

static void BM_SolveAdditionThreeWeights(benchmark::State& state) {
  const WeightVector w{0.15, 0.25, 0.6};
  for (auto _ : state) benchmark::DoNotOptimize(solve_addition(complex(0.6), w));
}
BENCHMARK(BM_SolveAdditionThreeWeights);

static void BM_RadialDensity(benchmark::State& state) {
  const WeightVector w{0.3, 0.5, 0.81};
  for (auto _ : state) benchmark::DoNotOptimize(radial_density(w));
}
BENCHMARK(BM_RadialDensity)->Unit(benchmark::kMillisecond);

static void BM_SvGreen(benchmark::State& state) {
  const auto w = two_value_weights(3, 0.2, 7, 0.35);
  for (auto _ : state) benchmark::DoNotOptimize(sv_green(complex(0.5, 1e-6), w));
}
BENCHMARK(BM_SvGreen)->Unit(benchmark::kMicrosecond);

static void BM_SvDensity(benchmark::State& state) {
  const WeightVector w{0.4, 0.6, 0.69282};
  for (auto _ : state) benchmark::DoNotOptimize(sv_density(w));
}
BENCHMARK(BM_SvDensity)->Unit(benchmark::kMillisecond);

static void BM_HaarUnitary(benchmark::State& state) {
  auto rng = iteration_rng(1, 0);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_haar_unitary(n, rng));
}
BENCHMARK(BM_HaarUnitary)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

static void BM_SimulateIteration(benchmark::State& state) {
  SimConfig cfg;
  cfg.n = static_cast<int>(state.range(0));
  cfg.iterations = 1;
  cfg.threads = 1;
  cfg.seed = 3;
  const WeightVector w{0.4, 0.6};
  for (auto _ : state) benchmark::DoNotOptimize(simulate_sum(w, cfg));
}
BENCHMARK(BM_SimulateIteration)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

static void BM_FitQ(benchmark::State& state) {
  const EigDensityModel model(WeightVector{0.4, 0.6});
  Histogram h;
  const auto& s = model.support();
  for (int i = 0; i <= 100; ++i) h.edges.push_back(s.r_int - 0.05 * s.r_ext + 1.1 * s.r_ext * i / 100.0 - 0.05 * s.r_ext * i / 100.0);
  for (int i = 0; i < 100; ++i) {
    const double c = h.center(i);
    h.heights.push_back(model.continued_density(c) * form_factor(c, 500, s, 3.0, 2.3));
  }
  for (auto _ : state) benchmark::DoNotOptimize(fit_q(h, model, 500));
}
BENCHMARK(BM_FitQ)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
