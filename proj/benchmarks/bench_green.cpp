#include <benchmark/benchmark.h>

#include "lcqft/field_eq.hpp"

using namespace lcqft;

namespace {

Spacetime flat(int n_t, int n_x) {
  const double dx = 2.0 * kPi / n_x;
  return Spacetime(n_t, n_x, 0.5 * dx, dx, Grid::Ones(n_t, n_x),
                   Grid::Ones(n_t, n_x), KGParams{1.0, 0.0});
}

void BM_GreenRetarded(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Spacetime M = flat(n, n);
  const TestFunction f = TestFunction::bump(M, n / 3, n / 2, 4.0, 4.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(green_retarded(M, f.values));
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}

void BM_TransportMatrix(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Spacetime M = flat(64, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(transport_matrix(M, 10, 50));
  }
}

}  // namespace

BENCHMARK(BM_GreenRetarded)->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(BM_TransportMatrix)->Arg(32)->Arg(64)->Arg(128);

BENCHMARK_MAIN();
