#include <benchmark/benchmark.h>

#include "smld/moments.hpp"
#include "smld/operator.hpp"
#include "smld/spectral.hpp"

namespace {

const smld::OperatorParams kParams{100.0, 0.5, 1.0};

// Fresh operator per iteration, so coefficient computation is included.
void BM_ApplyColdSmooth(benchmark::State& state) {
  for (auto _ : state) {
    smld::DurrmeyerOperator op(kParams, smld::TestFunction::exp_scaled(-1.0));
    benchmark::DoNotOptimize(op(1.0));
  }
}
BENCHMARK(BM_ApplyColdSmooth)->Unit(benchmark::kMillisecond);

void BM_ApplyColdKink(benchmark::State& state) {
  for (auto _ : state) {
    smld::DurrmeyerOperator op(kParams, smld::TestFunction::abs_shift(1.0));
    benchmark::DoNotOptimize(op(1.0));
  }
}
BENCHMARK(BM_ApplyColdKink)->Unit(benchmark::kMillisecond);

// Cached coefficients: the cost is the weighted sum alone.
void BM_ApplyWarm(benchmark::State& state) {
  smld::DurrmeyerOperator op(kParams, smld::TestFunction::abs_shift(1.0));
  benchmark::DoNotOptimize(op(1.0));
  for (auto _ : state) benchmark::DoNotOptimize(op(1.0));
}
BENCHMARK(BM_ApplyWarm);

void BM_RawMomentClosed(benchmark::State& state) {
  unsigned r = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(smld::raw_moment_closed(r, 2.0, kParams));
}
BENCHMARK(BM_RawMomentClosed)->Arg(2)->Arg(8);

void BM_RawMomentRecurrence(benchmark::State& state) {
  unsigned r = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(smld::raw_moment_recurrence(r, 2.0, kParams));
}
BENCHMARK(BM_RawMomentRecurrence)->Arg(2)->Arg(8);

void BM_CentralMomentBinomial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(smld::central_moment_binomial(8, 2.0, kParams));
}
BENCHMARK(BM_CentralMomentBinomial);

void BM_BuildP(benchmark::State& state) {
  long K = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(smld::build_P({10.0, 0.0, 2.0}, K));
  state.SetItemsProcessed(state.iterations() * (K + 1) * (K + 1));
}
BENCHMARK(BM_BuildP)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace
