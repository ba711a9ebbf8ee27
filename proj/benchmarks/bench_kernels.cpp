#include <benchmark/benchmark.h>

#include <algorithm>
#include <cmath>

#include "smld/special_fn.hpp"

namespace {

void BM_RegLowerGammaSeries(benchmark::State& state) {
  double s = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(smld::reg_lower_gamma(s, 0.7 * s));
}
BENCHMARK(BM_RegLowerGammaSeries)->Arg(2)->Arg(50)->Arg(1000);

void BM_RegLowerGammaFraction(benchmark::State& state) {
  double s = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(smld::reg_lower_gamma(s, 1.5 * s + 2.0));
}
BENCHMARK(BM_RegLowerGammaFraction)->Arg(2)->Arg(50)->Arg(1000);

void BM_KummerScaled(benchmark::State& state) {
  double z = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(smld::kummer_scaled(4.5, 1.5, z));
}
BENCHMARK(BM_KummerScaled)->Arg(1)->Arg(30)->Arg(100)->Arg(10000);

void BM_PoissonWeights(benchmark::State& state) {
  double mean = static_cast<double>(state.range(0));
  long half = static_cast<long>(10.0 * std::sqrt(mean) + 20.0);
  long lo = std::max(0L, static_cast<long>(mean) - half);
  long hi = static_cast<long>(mean) + half;
  for (auto _ : state) benchmark::DoNotOptimize(smld::poisson_weights(mean, lo, hi));
  state.SetItemsProcessed(state.iterations() * (hi - lo + 1));
}
BENCHMARK(BM_PoissonWeights)->Arg(10)->Arg(1000)->Arg(100000);

void BM_LogPoissonDensity(benchmark::State& state) {
  double k = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(smld::log_poisson_density(k, 500.0));
    k = k > 1000.0 ? 0.0 : k + 1.0;
  }
}
BENCHMARK(BM_LogPoissonDensity);

}  // namespace
