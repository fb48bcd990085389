#include <benchmark/benchmark.h>

#include "flagfact/factorization.hpp"
#include "flagfact/sampling.hpp"

using namespace flagfact;

namespace {

// range(0): dense size n, factored against the full standard flag.
void BM_Gauss(benchmark::State& state) {
  Sampler s(1);
  const auto inst = AlgebraInstance::dense(static_cast<int>(state.range(0)));
  const auto flag = full_flag(inst);
  const auto g = s.in_N_complement(flag, 0.5) * s.in_D_invertible(flag) * s.in_N(flag, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(gauss_decompose(g, flag));
}
BENCHMARK(BM_Gauss)->RangeMultiplier(2)->Range(4, 32);

void BM_NestGram(benchmark::State& state) {
  Sampler s(2);
  const auto inst = AlgebraInstance::dense(static_cast<int>(state.range(0)));
  const auto flag = full_flag(inst);
  const auto x = s.invertible(inst);
  for (auto _ : state) benchmark::DoNotOptimize(nest_gram_factorize(x, flag));
}
BENCHMARK(BM_NestGram)->RangeMultiplier(2)->Range(4, 32);

void BM_UAB(benchmark::State& state) {
  Sampler s(3);
  const auto inst = AlgebraInstance::dense(static_cast<int>(state.range(0)));
  const auto flag = full_flag(inst);
  const auto x = s.invertible(inst);
  for (auto _ : state) benchmark::DoNotOptimize(uab_decompose(x, flag));
}
BENCHMARK(BM_UAB)->RangeMultiplier(2)->Range(4, 32);

// Two-block flag over M_2(loop(2, m)); range(0) is the grid size m.
void BM_UABLoop(benchmark::State& state) {
  Sampler s(4);
  const auto inst =
      AlgebraInstance::block(2, AlgebraInstance::loop(2, static_cast<int>(state.range(0))));
  const auto flag = standard_flag(inst, {1});
  const auto x = s.invertible(inst);
  for (auto _ : state) benchmark::DoNotOptimize(uab_decompose(x, flag));
}
BENCHMARK(BM_UABLoop)->RangeMultiplier(4)->Range(64, 1024);

void BM_Invert(benchmark::State& state) {
  Sampler s(5);
  const auto inst = AlgebraInstance::dense(static_cast<int>(state.range(0)));
  const auto x = s.invertible(inst);
  for (auto _ : state) benchmark::DoNotOptimize(invert(x));
}
BENCHMARK(BM_Invert)->RangeMultiplier(2)->Range(4, 64);

void BM_LoopMultiply(benchmark::State& state) {
  Sampler s(6);
  const auto inst = AlgebraInstance::loop(4, static_cast<int>(state.range(0)));
  const auto x = s.gaussian(inst);
  const auto y = s.gaussian(inst);
  for (auto _ : state) benchmark::DoNotOptimize(x * y);
}
BENCHMARK(BM_LoopMultiply)->RangeMultiplier(4)->Range(64, 4096);

void BM_LoopSpectrum(benchmark::State& state) {
  Sampler s(7);
  const auto inst = AlgebraInstance::loop(4, static_cast<int>(state.range(0)));
  const auto x = s.gaussian(inst);
  for (auto _ : state) benchmark::DoNotOptimize(spectrum(x));
}
BENCHMARK(BM_LoopSpectrum)->RangeMultiplier(4)->Range(64, 1024);

}  // namespace

BENCHMARK_MAIN();
