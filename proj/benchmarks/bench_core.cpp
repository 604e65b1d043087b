#include <benchmark/benchmark.h>

#include "hirota/mps.hpp"
#include "hirota/quasilocality.hpp"
#include "hirota/transfer.hpp"

using namespace hirota;

namespace {

const MemoryGuard guard{8'000'000'000};

void BM_TransferDense(benchmark::State& state) {
  const int n_half = static_cast<int>(state.range(0));
  const auto root = make_root(2, 3);
  const auto pair = clock_shift(root);
  const auto geom = make_geometry(n_half, 3);
  TransferTable table(geom, pair, cx(2.0, 0.0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(table.dense(cx(0.6, 0.1), 0, guard));
  }
  state.SetComplexityN(geom.dim_total);
}
BENCHMARK(BM_TransferDense)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_TransferApply(benchmark::State& state) {
  const int n_half = static_cast<int>(state.range(0));
  const auto root = make_root(2, 3);
  const auto pair = clock_shift(root);
  const auto geom = make_geometry(n_half, 3);
  TransferTable table(geom, pair, cx(2.0, 0.0));
  const Mat b = table.dense(cx(0.4, 0.0), 1, guard);
  for (auto _ : state) {
    benchmark::DoNotOptimize(table.apply(cx(0.6, 0.1), 0, b, guard, 2));
  }
}
BENCHMARK(BM_TransferApply)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_ReducedEigensystem(benchmark::State& state) {
  const auto root = make_root(2, 3);
  const auto red = reduce_aux(cx(0.7, 0.2), cx(0.7, 0.2), root, 2.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(reduced_eigensystem(red));
  }
}
BENCHMARK(BM_ReducedEigensystem);

void BM_KernelClosedForm(benchmark::State& state) {
  const auto root = make_root(2, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hs_kernel(cx(0.5, 0.1), cx(0.6, -0.05), 2.0, root));
  }
}
BENCHMARK(BM_KernelClosedForm);

void BM_KernelFromAux(benchmark::State& state) {
  const auto root = make_root(2, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hs_kernel_from_aux(cx(0.5, 0.1), cx(0.6, -0.05), 2.0, root));
  }
}
BENCHMARK(BM_KernelFromAux);

void BM_MpsTable(benchmark::State& state) {
  const int r_max = static_cast<int>(state.range(0));
  const auto root = make_root(2, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_mps_table(cx(0.5, 0.0), 1.0, root, r_max));
  }
}
BENCHMARK(BM_MpsTable)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
