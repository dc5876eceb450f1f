#include <chrono>

#include "cli.hpp"
#include "mlep/error.hpp"
#include "mlep/lep.hpp"
#include "mlep/rng.hpp"

namespace mlep::cli {

namespace {

template <typename Fn>
double time_ms(int iters, Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < iters; ++i) fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

}  // namespace

BenchResult run_lep_bench(const BenchOptions& opt) {
  if (opt.iters < 1 || opt.size < 2 || opt.channels < 1) {
    throw Error(ErrorCode::kConfig, "bench needs --iters >= 1, --size >= 2, --channels >= 1");
  }
  ScaledStack stack(opt.size, opt.size, opt.channels);
  CounterRng rng(opt.seed);
  // Random values from a narrow range so every level occurs.
  for (auto& v : stack.data) v = static_cast<std::uint8_t>(rng.below(6));

  BenchResult r;
  r.outputs_equal = lep_naive(stack, 1) == lep_fast(stack, 1);

  volatile std::size_t sink = 0;
  const double naive_ms = time_ms(opt.iters, [&] { sink = sink + lep_naive(stack, 1).data[0]; });
  const double fast_ms = time_ms(opt.iters, [&] { sink = sink + lep_fast(stack, 1).data[0]; });
  const double pixels = static_cast<double>(stack.data.size());
  r.naive_ms_per_iter = naive_ms / opt.iters;
  r.fast_ms_per_iter = fast_ms / opt.iters;
  r.naive_ns_per_pixel = r.naive_ms_per_iter * 1e6 / pixels;
  r.fast_ns_per_pixel = r.fast_ms_per_iter * 1e6 / pixels;
  return r;
}

}  // namespace mlep::cli
