#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mlep/lep.hpp"
#include "mlep/pipeline.hpp"

namespace mlep {

/// Per-channel 5-bin level histograms normalised by window count,
/// concatenated in channel order (length 5 * channels).
using HistFeature = std::vector<double>;

HistFeature featurize(const LepMap& map);

/// Prediction clamp used by bce_loss.
inline constexpr double kBceEpsilon = 1e-7;

/// Mean binary cross-entropy; predictions are clamped to
/// [kBceEpsilon, 1 - kBceEpsilon]. Empty input is kConfig.
double bce_loss(std::span<const double> preds, std::span<const int> labels);

struct TrainParams {
  std::uint64_t seed = 0;
  int epochs = 200;
  double learning_rate = 0.002;
  int batch_size = 64;
  int hidden_dim = 16;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
};

struct TrainingInfo {
  std::uint64_t seed = 0;
  int epochs = 0;
  double learning_rate = 0.0;
  int batch_size = 0;
  double final_loss = 0.0;
};

/// One hidden tanh layer, sigmoid output. Inputs are standardised with the
/// per-feature mean/scale fitted on the training set before the first layer.
struct DetectorModel {
  int input_dim = 0;
  int hidden_dim = 0;
  std::vector<double> input_mean;   // input_dim
  std::vector<double> input_scale;  // input_dim
  std::vector<double> w1;           // hidden_dim x input_dim, row-major
  std::vector<double> b1;           // hidden_dim
  std::vector<double> w2;           // hidden_dim
  double b2 = 0.0;
  TrainingInfo training;
  /// Extraction settings the features came from, when known.
  std::optional<MlepConfig> config;

  /// Zero weights, identity standardisation.
  static DetectorModel zeros(int input_dim, int hidden_dim);
  /// Xavier-uniform weights from a seeded stream, zero biases.
  static DetectorModel initialized(int input_dim, int hidden_dim, std::uint64_t seed);

  /// Flattened trainable parameters: w1, b1, w2, b2.
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> params);
  std::size_t parameter_count() const noexcept {
    return static_cast<std::size_t>(hidden_dim) * (input_dim + 2) + 1;
  }

  double logit(std::span<const double> feature) const;

  /// Checks shapes, finiteness and (when config is set) that input_dim
  /// matches 5 * C * K for some C in {1, 3}. Throws kConfig.
  void validate() const;

  std::string to_json() const;
  static DetectorModel from_json(const std::string& text);
};

/// Probability in (0, 1). Dim mismatch is kDimension.
double predict(const DetectorModel& model, std::span<const double> feature);

/// Mean BCE over the samples and its gradient w.r.t. parameters() order.
struct LossGradient {
  double loss = 0.0;
  std::vector<double> gradient;
};
LossGradient loss_and_gradient(const DetectorModel& model,
                               std::span<const HistFeature> features,
                               std::span<const int> labels);

/// Mini-batch Adam on the BCE objective. Needs >= 2 samples covering both
/// classes (kTraining). Deterministic for a fixed seed.
DetectorModel train(std::span<const HistFeature> features, std::span<const int> labels,
                    const TrainParams& params);

}  // namespace mlep
