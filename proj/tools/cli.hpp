#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "mlep/pipeline.hpp"
#include "mlep/tensor_io.hpp"

namespace mlep::cli {

// Exit-code contract.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitInternal = 3;

/// Environment variable that, when set, replaces --seed.
inline constexpr const char* kSeedEnv = "MLEP_SEED";

struct ExtractOptions {
  std::filesystem::path input;
  std::filesystem::path out_dir;
  MlepConfig config;
  TensorDtype dtype = TensorDtype::kLevelU8;
  bool viz = false;
  int jobs = 1;
};

struct HistOptions {
  std::filesystem::path manifest;
  std::filesystem::path out_csv;
  MlepConfig config;
  int jobs = 1;
};

struct DiffOptions {
  std::filesystem::path real;
  std::filesystem::path fake;
  std::filesystem::path out_dir;
  MlepConfig config;
};

struct TrainOptions {
  std::filesystem::path manifest;
  std::filesystem::path model;
  MlepConfig config;
  int epochs = 200;
  double learning_rate = 0.002;
  int batch_size = 64;
  int hidden = 16;
  int jobs = 1;
};

struct EvalOptions {
  std::filesystem::path manifest;
  std::filesystem::path model;
  std::filesystem::path report;  // optional JSON output
  int jobs = 1;
};

struct BenchOptions {
  int size = 224;
  int channels = 9;
  int iters = 10;
  std::uint64_t seed = 0;
};

struct BenchResult {
  double naive_ns_per_pixel = 0.0;
  double fast_ns_per_pixel = 0.0;
  double naive_ms_per_iter = 0.0;
  double fast_ms_per_iter = 0.0;
  bool outputs_equal = false;
  double speedup() const { return naive_ns_per_pixel / fast_ns_per_pixel; }
};

/// Times lep_naive and lep_fast (stride 1, single thread) on a seeded random
/// stack after checking that both produce the same map.
BenchResult run_lep_bench(const BenchOptions& opt);

int cmd_extract(const ExtractOptions& opt, std::ostream& out, std::ostream& err);
int cmd_hist(const HistOptions& opt, std::ostream& out, std::ostream& err);
int cmd_diff(const DiffOptions& opt, std::ostream& out, std::ostream& err);
int cmd_train(const TrainOptions& opt, std::ostream& out, std::ostream& err);
int cmd_eval(const EvalOptions& opt, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchOptions& opt, std::ostream& out, std::ostream& err);

/// Parses argv (argv[0] is the program name) and dispatches.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mlep::cli
