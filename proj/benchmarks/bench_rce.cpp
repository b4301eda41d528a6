#include <benchmark/benchmark.h>

#include "lcqft/dynamics.hpp"

using namespace lcqft;

namespace {

Spacetime flat(int n_t, int n_x) {
  const double dx = 2.0 * kPi / n_x;
  return Spacetime(n_t, n_x, 0.5 * dx, dx, Grid::Ones(n_t, n_x),
                   Grid::Ones(n_t, n_x), KGParams{1.0, 0.0});
}

void BM_RceMap(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Spacetime M = flat(64, n);
  const MetricPerturbation h =
      MetricPerturbation::bump(M, 20, n / 2, 3.0, 3.0, 0.08, 0.05);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rce(M, h, 40));
  }
}

void BM_StressEnergyPairing(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Spacetime M = flat(2 * n, n);
  const MetricPerturbation h =
      MetricPerturbation::bump(M, 2 * n / 4, n / 2, 3.0, 3.0, 0.1, 0.06);
  const TestFunction f =
      TestFunction::bump(M, 2 * n / 2 + 4, n / 3, 3.0, 4.0, 0.9);
  for (auto _ : state) {
    benchmark::DoNotOptimize(stress_energy_pairing(M, h, f, 2 * n - 10));
  }
}

}  // namespace

BENCHMARK(BM_RceMap)->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(BM_StressEnergyPairing)->Arg(64)->Arg(128)->Arg(256);
