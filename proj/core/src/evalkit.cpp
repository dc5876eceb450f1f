#include "mlep/evalkit.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <optional>
#include <set>

#include "json.hpp"
#include "mlep/error.hpp"
#include "mlep/file_util.hpp"
#include "mlep/image_codec.hpp"
#include "mlep/parallel.hpp"
#include "mlep/rng.hpp"

namespace mlep {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Splits one CSV line; supports double-quoted fields with "" escapes.
std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"' && trim(cur).empty()) {
      quoted = true;
      was_quoted = true;
      cur.clear();
    } else if (ch == ',') {
      fields.push_back(was_quoted ? cur : std::string(trim(cur)));
      cur.clear();
      was_quoted = false;
    } else {
      cur += ch;
    }
  }
  if (quoted) {
    throw Error(ErrorCode::kParse, "manifest line " + std::to_string(line_no) + ": unterminated quote");
  }
  fields.push_back(was_quoted ? cur : std::string(trim(cur)));
  return fields;
}

std::string quote_csv(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string format_double(double v, const char* fmt) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

}  // namespace

Manifest Manifest::parse(std::string_view csv, std::filesystem::path base_dir) {
  Manifest m;
  m.base_dir = std::move(base_dir);
  std::set<std::string> seen;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!csv.empty()) {
    const auto nl = csv.find('\n');
    const std::string_view raw = csv.substr(0, nl);
    csv = nl == std::string_view::npos ? std::string_view() : csv.substr(nl + 1);
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    const auto fields = split_csv_line(line, line_no);
    if (!header_seen) {
      if (fields.size() != 3 || fields[0] != "path" || fields[1] != "label" || fields[2] != "split") {
        throw Error(ErrorCode::kParse, "manifest header must be 'path,label,split'");
      }
      header_seen = true;
      continue;
    }
    const std::string where = "manifest line " + std::to_string(line_no) + ": ";
    if (fields.size() != 3) throw Error(ErrorCode::kParse, where + "expected 3 fields");
    ManifestRecord r;
    if (fields[0].empty()) throw Error(ErrorCode::kParse, where + "empty path");
    r.path = fields[0];
    if (fields[1] == "0") r.label = 0;
    else if (fields[1] == "1") r.label = 1;
    else throw Error(ErrorCode::kParse, where + "label must be 0 or 1, got '" + fields[1] + "'");
    if (fields[2] == "train") r.split = Split::kTrain;
    else if (fields[2] == "test") r.split = Split::kTest;
    else throw Error(ErrorCode::kParse, where + "split must be train or test, got '" + fields[2] + "'");
    if (!seen.insert(fields[0]).second) {
      throw Error(ErrorCode::kParse, where + "duplicate path '" + fields[0] + "'");
    }
    m.records.push_back(std::move(r));
  }
  if (!header_seen) throw Error(ErrorCode::kParse, "manifest is empty");
  return m;
}

Manifest Manifest::load(const std::filesystem::path& csv_path) {
  const auto bytes = read_file(csv_path);
  return parse(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()),
               csv_path.parent_path());
}

std::filesystem::path Manifest::resolve(const ManifestRecord& r) const {
  return r.path.is_absolute() || base_dir.empty() ? r.path : base_dir / r.path;
}

std::vector<std::size_t> Manifest::indices(Split split) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].split == split) out.push_back(i);
  }
  if (out.empty()) {
    throw Error(ErrorCode::kConfig, std::string("manifest has no ") +
                                        (split == Split::kTrain ? "train" : "test") +
                                        " records");
  }
  return out;
}

std::string Manifest::to_csv() const {
  std::string out = "path,label,split\n";
  for (const auto& r : records) {
    out += quote_csv(r.path.string()) + "," + std::to_string(r.label) + "," +
           (r.split == Split::kTrain ? "train" : "test") + "\n";
  }
  return out;
}

double accuracy(std::span<const double> preds, std::span<const int> labels, double threshold) {
  if (preds.empty()) throw Error(ErrorCode::kConfig, "accuracy of an empty set is undefined");
  if (preds.size() != labels.size()) {
    throw Error(ErrorCode::kDimension, "predictions and labels differ in length");
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    correct += static_cast<int>(preds[i] >= threshold) == labels[i];
  }
  return static_cast<double>(correct) / static_cast<double>(preds.size());
}

double average_precision(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorCode::kDimension, "scores and labels differ in length");
  }
  const auto positives = std::count(labels.begin(), labels.end(), 1);
  if (positives == 0) {
    throw Error(ErrorCode::kUndefinedMetric, "average precision needs at least one positive");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double sum = 0.0;
  std::size_t tp = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (labels[order[k]] == 1) {
      ++tp;
      sum += static_cast<double>(tp) / static_cast<double>(k + 1);
    }
  }
  return sum / static_cast<double>(positives);
}

std::string EvalReport::to_json() const {
  nlohmann::json j;
  j["accuracy"] = accuracy;
  j["average_precision"] = average_precision;
  j["n_samples"] = n_samples;
  j["threshold"] = threshold;
  j["per_class"] = {{"real", n_real}, {"fake", n_fake}};
  j["confusion"] = {{"true_positive", true_positive},
                    {"true_negative", true_negative},
                    {"false_positive", false_positive},
                    {"false_negative", false_negative}};
  return j.dump(2);
}

EvalReport report_from_scores(std::span<const double> scores, std::span<const int> labels,
                              double threshold) {
  EvalReport r;
  r.threshold = threshold;
  r.n_samples = scores.size();
  r.accuracy = accuracy(scores, labels, threshold);
  r.average_precision = average_precision(scores, labels);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool positive = scores[i] >= threshold;
    if (labels[i] == 1) {
      ++r.n_fake;
      positive ? ++r.true_positive : ++r.false_negative;
    } else {
      ++r.n_real;
      positive ? ++r.false_positive : ++r.true_negative;
    }
  }
  return r;
}

std::uint64_t image_id(const std::filesystem::path& path) {
  return fnv1a64(path.filename().string());
}

MlepConfig per_image_config(const MlepConfig& cfg, std::uint64_t id, ExtractMode mode,
                            std::uint64_t epoch) {
  MlepConfig out = cfg;
  if (mode == ExtractMode::kEval) {
    out.seed = derive_seed(cfg.seed, id);
    out.crop = CenterCrop{};
  } else {
    out.seed = derive_seed(cfg.seed, id, epoch);
    out.crop = RandomCrop{derive_seed(out.seed, 0xc209)};
  }
  return out;
}

FeatureSet extract_features(const Manifest& manifest, Split split, const MlepConfig& cfg,
                            ExtractMode mode, int jobs, bool skip_unreadable) {
  cfg.validate();
  const auto idx = manifest.indices(split);
  std::vector<std::optional<HistFeature>> slots(idx.size());
  std::vector<std::string> errors(idx.size());
  parallel_for(idx.size(), jobs, [&](std::size_t k) {
    const auto& rec = manifest.records[idx[k]];
    const auto path = manifest.resolve(rec);
    try {
      const RasterImage img = decode_image(read_file(path));
      const MlepConfig local = per_image_config(cfg, image_id(rec.path), mode);
      slots[k] = featurize(extract_mlep(img, local));
    } catch (const Error& e) {
      if (!skip_unreadable) throw e.with_stage(path.string());
      errors[k] = path.string() + ": " + e.what();
    }
  });
  FeatureSet out;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (!slots[k]) {
      out.warnings.push_back(errors[k]);
      ++out.skipped;
      continue;
    }
    out.features.push_back(std::move(*slots[k]));
    out.labels.push_back(manifest.records[idx[k]].label);
    out.record_index.push_back(idx[k]);
  }
  return out;
}

DetectorModel train_from_manifest(const Manifest& manifest, const MlepConfig& cfg,
                                  const TrainParams& params, int jobs) {
  const FeatureSet fs = extract_features(manifest, Split::kTrain, cfg, ExtractMode::kTrain, jobs);
  DetectorModel model = train(fs.features, fs.labels, params);
  model.config = cfg;
  return model;
}

EvalReport evaluate(const DetectorModel& model, const Manifest& manifest, const MlepConfig& cfg,
                    int jobs) {
  const FeatureSet fs = extract_features(manifest, Split::kTest, cfg, ExtractMode::kEval, jobs);
  std::vector<double> scores;
  scores.reserve(fs.features.size());
  for (const auto& f : fs.features) scores.push_back(predict(model, f));
  return report_from_scores(scores, fs.labels);
}

std::string HistogramReport::to_csv() const {
  std::string out = "class,level_value,probability\n";
  auto emit = [&](const char* name, const std::array<double, kLevelCount>& dist) {
    for (int k = 0; k < kLevelCount; ++k) {
      out += std::string(name) + "," + format_double(kLevelValues[k], "%.6f") + "," +
             format_double(dist[k], "%.8f") + "\n";
    }
  };
  emit("real", real);
  emit("fake", fake);
  return out;
}

HistogramReport entropy_histogram_report(const Manifest& manifest, const MlepConfig& cfg,
                                         int jobs) {
  cfg.validate();
  const std::size_t n = manifest.records.size();
  std::vector<std::optional<std::array<double, kLevelCount>>> slots(n);
  std::vector<std::string> errors(n);
  parallel_for(n, jobs, [&](std::size_t i) {
    const auto& rec = manifest.records[i];
    const auto path = manifest.resolve(rec);
    try {
      const RasterImage img = decode_image(read_file(path));
      const MlepConfig local = per_image_config(cfg, image_id(rec.path), ExtractMode::kEval);
      const LepMap map = extract_mlep(img, local);
      const HistFeature f = featurize(map);
      // Scale-major layout: the first C planes are the scale-1 block.
      std::array<double, kLevelCount> dist{};
      for (int c = 0; c < img.channels(); ++c) {
        for (int k = 0; k < kLevelCount; ++k) dist[k] += f[c * kLevelCount + k];
      }
      for (auto& d : dist) d /= img.channels();
      slots[i] = dist;
    } catch (const Error& e) {
      errors[i] = path.string() + ": " + e.what();
    }
  });
  HistogramReport report;
  for (std::size_t i = 0; i < n; ++i) {
    if (!slots[i]) {
      ++report.skipped;
      report.warnings.push_back(errors[i]);
      continue;
    }
    auto& acc = manifest.records[i].label == 1 ? report.fake : report.real;
    for (int k = 0; k < kLevelCount; ++k) acc[k] += (*slots[i])[k];
    ++(manifest.records[i].label == 1 ? report.n_fake : report.n_real);
  }
  for (int k = 0; k < kLevelCount; ++k) {
    if (report.n_real) report.real[k] /= static_cast<double>(report.n_real);
    if (report.n_fake) report.fake[k] /= static_cast<double>(report.n_fake);
  }
  return report;
}

}  // namespace mlep
