// Microbenchmarks for the hot paths: dephasing maps, spectral QFI,
// trajectory sampling, time optimization, posterior updates. Run via
// build/benchmarks/ouspec_bench; pass --benchmark_filter=... to select.

#include <benchmark/benchmark.h>

#include "ouspec/ouspec.hpp"

namespace {

using namespace ouspec;

const EvolutionSpec kSpec(NoiseParams(10.0, 1.0), 0.1);

void BM_DephaseWithDerivative(benchmark::State& state) {
  const auto psi = ghz_state(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto out = dephase_with_derivative(psi, kSpec);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_DephaseWithDerivative)->DenseRange(1, 8);

void BM_QfiClosedGhz(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(qfi_ghz_closed(n, kSpec));
}
BENCHMARK(BM_QfiClosedGhz)->Arg(2)->Arg(5);

void BM_QfiGeneral(benchmark::State& state) {
  const auto psi = haar_random_state(static_cast<int>(state.range(0)), 42);
  for (auto _ : state) benchmark::DoNotOptimize(qfi_of_state(psi, kSpec));
}
BENCHMARK(BM_QfiGeneral)->DenseRange(1, 6);

void BM_OuTrajectory(benchmark::State& state) {
  const NoiseParams params(1.0, 1.0);
  const auto steps = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto traj = sample_ou_trajectory(params, 0.01, steps, 7);
    benchmark::DoNotOptimize(traj);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(steps));
}
BENCHMARK(BM_OuTrajectory)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_MaximizeOverTime(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto curve = [n](double t) { return qfi_ghz_closed(n, EvolutionSpec(NoiseParams(10.0, 1.0), t)); };
  for (auto _ : state) {
    auto r = maximize_over_time(curve, 0.1);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_MaximizeOverTime)->Arg(2)->Arg(4);

void BM_PosteriorUpdate(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.n_qubits = 2;
  cfg.gamma_true = 10.0;
  cfg.grid_points = static_cast<int>(state.range(0));
  cfg.seed = 11;
  const auto resolved = cfg.resolved();
  const long k = simulate_outcomes(resolved);
  for (auto _ : state) {
    auto post = posterior(k, resolved);
    benchmark::DoNotOptimize(post);
  }
}
BENCHMARK(BM_PosteriorUpdate)->Arg(500)->Arg(2000)->Arg(8000);

void BM_HaarSample(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::uint64_t s = 0;
  for (auto _ : state) {
    auto psi = haar_random_state(n, ++s);
    benchmark::DoNotOptimize(psi);
  }
}
BENCHMARK(BM_HaarSample)->Arg(2)->Arg(6);

}  // namespace

BENCHMARK_MAIN();
