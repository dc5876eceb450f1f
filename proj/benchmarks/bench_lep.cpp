#include <benchmark/benchmark.h>

#include "mlep/lep.hpp"
#include "mlep/pyramid.hpp"
#include "mlep/rng.hpp"

namespace {

mlep::ScaledStack random_stack(int size, int channels) {
  mlep::ScaledStack st(size, size, channels);
  mlep::CounterRng rng(42);
  for (auto& v : st.data) v = static_cast<std::uint8_t>(rng.below(6));
  return st;
}

void set_pixels(benchmark::State& state, const mlep::ScaledStack& st) {
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(st.data.size()));
}

void BM_LepNaive(benchmark::State& state) {
  const auto st = random_stack(static_cast<int>(state.range(0)), 9);
  for (auto _ : state) benchmark::DoNotOptimize(mlep::lep_naive(st, 1));
  set_pixels(state, st);
}
BENCHMARK(BM_LepNaive)->Arg(64)->Arg(224)->Unit(benchmark::kMillisecond);

void BM_LepFast(benchmark::State& state) {
  const auto st = random_stack(static_cast<int>(state.range(0)), 9);
  for (auto _ : state) benchmark::DoNotOptimize(mlep::lep_fast(st, 1, 1));
  set_pixels(state, st);
}
BENCHMARK(BM_LepFast)->Arg(64)->Arg(224)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_LepFastStride2(benchmark::State& state) {
  const auto st = random_stack(224, 9);
  for (auto _ : state) benchmark::DoNotOptimize(mlep::lep_fast(st, 2, 1));
  set_pixels(state, st);
}
BENCHMARK(BM_LepFastStride2)->Unit(benchmark::kMillisecond);

void BM_LepFastThreads(benchmark::State& state) {
  const auto st = random_stack(512, 9);
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mlep::lep_fast(st, 1, threads));
  set_pixels(state, st);
}
BENCHMARK(BM_LepFastThreads)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

}  // namespace
