#include <benchmark/benchmark.h>

#include <numeric>

#include "regrid/redist.hpp"

namespace {

using namespace regrid;

void bench_schedule_1d(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const int q = static_cast<int>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(schedule_1d(p, q, 512));
  }
}
BENCHMARK(bench_schedule_1d)->Args({4, 5})->Args({12, 30})->Args({32, 48});

void bench_schedule_2d(benchmark::State& state) {
  const proc_grid src = make_grid(4, 5);
  const proc_grid dst = make_grid(5, 5);
  const std::int64_t nb = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(schedule_2d(src, dst, nb, nb));
  }
  state.SetItemsProcessed(state.iterations() * nb * nb);
}
BENCHMARK(bench_schedule_2d)->Arg(32)->Arg(128)->Arg(329);

void bench_schedule_via_root(benchmark::State& state) {
  const proc_grid src = make_grid(4, 5);
  const proc_grid dst = make_grid(5, 5);
  const std::int64_t nb = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(schedule_via_root(src, dst, nb, nb));
  }
}
BENCHMARK(bench_schedule_via_root)->Arg(32)->Arg(128);

void bench_execute(benchmark::State& state) {
  const std::int64_t n = state.range(0);
  matrix a(n, n);
  std::iota(a.data.begin(), a.data.end(), 1.0);
  const block_cyclic_layout src{n, n, 16, 16, make_grid(2, 3)};
  const block_cyclic_layout dst{n, n, 16, 16, make_grid(3, 3)};
  const redist_schedule plan =
      schedule_2d(src.grid, dst.grid, src.num_block_rows(), src.num_block_cols());
  for (auto _ : state) {
    benchmark::DoNotOptimize(execute(a, src, dst, plan));
  }
  state.SetBytesProcessed(state.iterations() * n * n * 8);
}
BENCHMARK(bench_execute)->Arg(256)->Arg(1024);

void bench_redist_cost(benchmark::State& state) {
  const redist_schedule plan = schedule_2d(make_grid(5, 6), make_grid(6, 6), 329, 329);
  const cost_params costs{};
  for (auto _ : state) {
    benchmark::DoNotOptimize(redist_cost(plan, costs));
  }
}
BENCHMARK(bench_redist_cost);

}  // namespace

BENCHMARK_MAIN();
