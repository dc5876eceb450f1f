#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "mlep/error.hpp"
#include "mlep/learn.hpp"
#include "mlep/rng.hpp"
#include "support.hpp"

namespace {

using mlep::DetectorModel;
using mlep::HistFeature;
namespace mt = mlep::testing;

TEST(Featurize, ConstantMapIsOneHotPerChannel) {
  mlep::LepMap map;
  map.height = 3;
  map.width = 4;
  map.channels = 2;
  map.data.assign(24, 0);
  const auto f = mlep::featurize(map);
  EXPECT_EQ(f, (HistFeature{1, 0, 0, 0, 0, 1, 0, 0, 0, 0}));
}

TEST(Featurize, GroupsSumToOne) {
  const auto map = mlep::lep_fast(mt::random_stack(3, 20, 30, 6, 4), 1);
  const auto f = mlep::featurize(map);
  ASSERT_EQ(f.size(), 30u);
  for (int c = 0; c < 6; ++c) {
    EXPECT_NEAR(std::accumulate(f.begin() + 5 * c, f.begin() + 5 * c + 5, 0.0), 1.0, 1e-12);
  }
}

TEST(Featurize, NoiseMatchesPartitionOracle) {
  const auto map = mlep::lep_fast(mt::random_stack(11, 224, 224, 1, 256), 2);
  const auto f = mlep::featurize(map);
  const auto p = mt::level_probabilities(256);
  const double n = static_cast<double>(map.plane_size());
  for (int k = 0; k < 5; ++k) {
    const double sigma = std::sqrt(p[k] * (1 - p[k]) / n);
    EXPECT_NEAR(f[k], p[k], 3 * sigma + 1.0 / n) << k;
  }
  EXPECT_NEAR(p[4], 16386810.0 / 16777216.0, 1e-15);
}

TEST(Bce, ScalarExamples) {
  const double half[] = {0.5};
  const int one[] = {1};
  EXPECT_NEAR(mlep::bce_loss(half, one), 0.693147, 1e-6);
  const double near_one[] = {1 - 1e-7};
  EXPECT_NEAR(mlep::bce_loss(near_one, one), 1e-7, 1e-12);
  const double preds[] = {0.9, 0.2};
  const int labels[] = {1, 0};
  // -(ln 0.9 + ln 0.8) / 2
  EXPECT_NEAR(mlep::bce_loss(preds, labels), 0.16425203348601893, 1e-12);
}

TEST(Bce, ClampsExtremes) {
  const double preds[] = {0.0, 1.0};
  const int labels[] = {1, 0};
  EXPECT_NEAR(mlep::bce_loss(preds, labels), -std::log(1e-7), 1e-6);
  EXPECT_THROW(mlep::bce_loss(std::span<const double>{}, std::span<const int>{}), mlep::Error);
  const int bad[] = {2, 0};
  EXPECT_THROW(mlep::bce_loss(preds, bad), mlep::Error);
}

TEST(Model, ZeroWeightsPredictHalf) {
  const auto m = DetectorModel::zeros(10, 4);
  const HistFeature f(10, 0.3);
  EXPECT_DOUBLE_EQ(mlep::predict(m, f), 0.5);
  EXPECT_THROW(mlep::predict(m, HistFeature(9, 0.0)), mlep::Error);
}

TEST(Model, ParameterRoundTripAndJson) {
  auto m = DetectorModel::initialized(15, 16, 3);
  EXPECT_EQ(m.parameters().size(), m.parameter_count());
  auto p = m.parameters();
  for (auto& v : p) v += 0.25;
  m.set_parameters(p);
  EXPECT_EQ(m.parameters(), p);
  m.config = mlep::MlepConfig{};
  m.config->scales = mlep::ScaleSet::parse("1");
  const auto back = DetectorModel::from_json(m.to_json());
  EXPECT_EQ(back.parameters(), m.parameters());
  EXPECT_EQ(back.input_mean, m.input_mean);
  EXPECT_EQ(back.config, m.config);
  EXPECT_THROW(DetectorModel::from_json("[]"), mlep::Error);
  EXPECT_THROW(DetectorModel::from_json("{\"format\":\"something-else\"}"), mlep::Error);
}

TEST(Model, ValidateChecksConfigDims) {
  auto m = DetectorModel::initialized(15, 4, 1);
  m.config = mlep::MlepConfig{};  // 3 scales: 5*C*3 is 15 or 45
  EXPECT_NO_THROW(m.validate());
  auto bad = DetectorModel::initialized(20, 4, 1);
  bad.config = mlep::MlepConfig{};
  EXPECT_THROW(bad.validate(), mlep::Error);
}

TEST(Gradient, MatchesCentralDifferences) {
  mlep::CounterRng rng(8);
  std::vector<HistFeature> features(12, HistFeature(7));
  std::vector<int> labels(12);
  for (std::size_t i = 0; i < features.size(); ++i) {
    for (auto& v : features[i]) v = rng.uniform();
    labels[i] = static_cast<int>(i % 2);
  }
  auto m = DetectorModel::initialized(7, 5, 21);
  for (std::size_t i = 0; i < m.input_mean.size(); ++i) {
    m.input_mean[i] = 0.5;
    m.input_scale[i] = 2.0;
  }
  const auto analytic = mlep::loss_and_gradient(m, features, labels);
  const auto base = m.parameters();
  const double h = 1e-5;
  double worst = 0;
  for (std::size_t k = 0; k < base.size(); ++k) {
    auto p = base;
    p[k] = base[k] + h;
    m.set_parameters(p);
    const double up = mlep::loss_and_gradient(m, features, labels).loss;
    p[k] = base[k] - h;
    m.set_parameters(p);
    const double down = mlep::loss_and_gradient(m, features, labels).loss;
    const double numeric = (up - down) / (2 * h);
    const double a = analytic.gradient[k];
    worst = std::max(worst, std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-6}));
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(Train, SeparatesToyData) {
  std::vector<HistFeature> features;
  std::vector<int> labels;
  mlep::CounterRng rng(4);
  while (features.size() < 64) {
    const double a = rng.uniform(), b = rng.uniform();
    if (std::abs(a + b - 1.0) < 0.1) continue;  // keep a margin around the boundary
    features.push_back({a, b});
    labels.push_back(a + b > 1.0 ? 1 : 0);
  }
  mlep::TrainParams params;
  params.epochs = 500;
  params.batch_size = 16;
  params.learning_rate = 0.02;
  params.seed = 3;
  const auto m = mlep::train(features, labels, params);
  std::vector<double> preds;
  for (const auto& f : features) preds.push_back(mlep::predict(m, f));
  EXPECT_LT(mlep::bce_loss(preds, labels), 0.01);
  EXPECT_LT(m.training.final_loss, 0.01);
  const auto again = mlep::train(features, labels, params);
  EXPECT_EQ(again.parameters(), m.parameters());
}

TEST(Train, RejectsUnusableData) {
  const std::vector<HistFeature> one = {{0.1}};
  const std::vector<int> one_label = {1};
  mlep::TrainParams params;
  try {
    mlep::train(one, one_label, params);
    FAIL();
  } catch (const mlep::Error& e) {
    EXPECT_EQ(e.code(), mlep::ErrorCode::kTraining);
  }
  const std::vector<HistFeature> two = {{0.1}, {0.2}};
  const std::vector<int> same = {0, 0};
  try {
    mlep::train(two, same, params);
    FAIL();
  } catch (const mlep::Error& e) {
    EXPECT_EQ(e.code(), mlep::ErrorCode::kTraining);
  }
}

}  // namespace
