#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mlep/learn.hpp"
#include "mlep/lep.hpp"
#include "mlep/pipeline.hpp"

namespace mlep {

enum class Split { kTrain, kTest };

struct ManifestRecord {
  std::filesystem::path path;  // as written in the CSV
  int label = 0;               // 0 = real, 1 = fake
  Split split = Split::kTrain;
};

/// CSV with header `path,label,split`. Relative paths resolve against the
/// manifest's directory.
struct Manifest {
  std::vector<ManifestRecord> records;
  std::filesystem::path base_dir;

  /// Labels in {0,1}, split in {train,test}, paths unique. kParse otherwise.
  static Manifest parse(std::string_view csv, std::filesystem::path base_dir = {});
  static Manifest load(const std::filesystem::path& csv_path);

  std::filesystem::path resolve(const ManifestRecord& r) const;
  /// Record indices in the split; kConfig if there are none.
  std::vector<std::size_t> indices(Split split) const;
  std::string to_csv() const;
};

/// Fraction of samples with (pred >= threshold) == label.
double accuracy(std::span<const double> preds, std::span<const int> labels,
                double threshold = 0.5);

/// Non-interpolated AP: rank by score descending (ties by original index),
/// AP = (1/P) * sum over positive ranks k of precision@k. No positives is
/// kUndefinedMetric.
double average_precision(std::span<const double> scores, std::span<const int> labels);

struct EvalReport {
  double accuracy = 0.0;
  double average_precision = 0.0;
  std::size_t n_samples = 0;
  double threshold = 0.5;
  std::size_t n_real = 0;
  std::size_t n_fake = 0;
  std::size_t true_positive = 0;
  std::size_t true_negative = 0;
  std::size_t false_positive = 0;
  std::size_t false_negative = 0;

  std::string to_json() const;
};

EvalReport report_from_scores(std::span<const double> scores, std::span<const int> labels,
                              double threshold = 0.5);

/// Stable per-image id: FNV-1a of the file name (not the directory).
std::uint64_t image_id(const std::filesystem::path& path);

enum class ExtractMode { kTrain, kEval };

/// Per-image extraction settings. Eval: shuffle seed derive_seed(base, id),
/// centre crop. Train: shuffle seed derive_seed(base, id, epoch) and a
/// random crop keyed the same way.
MlepConfig per_image_config(const MlepConfig& cfg, std::uint64_t id, ExtractMode mode,
                            std::uint64_t epoch = 0);

struct FeatureSet {
  std::vector<HistFeature> features;
  std::vector<int> labels;
  std::vector<std::size_t> record_index;  // into Manifest::records
  std::vector<std::string> warnings;      // one per skipped record
  std::size_t skipped = 0;
};

/// Extracts histogram features for the split, in manifest order.
/// With skip_unreadable, records that fail are reported in `warnings`;
/// otherwise the first failure is rethrown with the file path attached.
FeatureSet extract_features(const Manifest& manifest, Split split, const MlepConfig& cfg,
                            ExtractMode mode, int jobs, bool skip_unreadable = false);

DetectorModel train_from_manifest(const Manifest& manifest, const MlepConfig& cfg,
                                  const TrainParams& params, int jobs);

/// extract -> featurize -> predict over the test split.
EvalReport evaluate(const DetectorModel& model, const Manifest& manifest, const MlepConfig& cfg,
                    int jobs);

/// Mean scale-1 level distribution per class.
struct HistogramReport {
  std::array<double, kLevelCount> real{};
  std::array<double, kLevelCount> fake{};
  std::size_t n_real = 0;
  std::size_t n_fake = 0;
  std::size_t skipped = 0;
  std::vector<std::string> warnings;

  /// Columns `class,level_value,probability`, one row per (class, level).
  std::string to_csv() const;
};

/// Averages, over the scale-1 colour channels of each image and then over
/// the images of each class, the normalised level histogram. Unreadable
/// files are skipped with a warning.
HistogramReport entropy_histogram_report(const Manifest& manifest, const MlepConfig& cfg,
                                         int jobs = 1);

}  // namespace mlep
