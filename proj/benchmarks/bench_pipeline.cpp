#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "mlep/pipeline.hpp"
#include "mlep/pyramid.hpp"
#include "mlep/rng.hpp"
#include "mlep/spectrum.hpp"

namespace {

mlep::RasterImage noise(int size) {
  mlep::RasterImage img(size, size, 3);
  mlep::CounterRng rng(7);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng.below(256));
  return img;
}

void BM_BuildStack(benchmark::State& state) {
  const auto img = noise(224);
  const auto scales = mlep::ScaleSet::parse("1,0.5,0.25");
  const auto kernel = static_cast<mlep::InterpKernel>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mlep::build_stack(img, scales, kernel));
  state.SetLabel(std::string(mlep::to_string(kernel)));
}
BENCHMARK(BM_BuildStack)
    ->Arg(static_cast<int>(mlep::InterpKernel::kNearest))
    ->Arg(static_cast<int>(mlep::InterpKernel::kBilinear))
    ->Arg(static_cast<int>(mlep::InterpKernel::kBicubic))
    ->Unit(benchmark::kMillisecond);

void BM_ExtractMlep(benchmark::State& state) {
  // Non-square source, so the resize and crop stages run too.
  mlep::RasterImage img(256, 320, 3);
  mlep::CounterRng rng(9);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng.below(256));
  const mlep::MlepConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(mlep::extract_mlep(img, cfg, 1));
}
BENCHMARK(BM_ExtractMlep)->Unit(benchmark::kMillisecond);

void BM_Dft2(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<double> grid(static_cast<std::size_t>(n) * n);
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = std::sin(0.37 * static_cast<double>(i));
  for (auto _ : state) benchmark::DoNotOptimize(mlep::dft2(grid, n, n));
}
BENCHMARK(BM_Dft2)->Arg(64)->Arg(223)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
