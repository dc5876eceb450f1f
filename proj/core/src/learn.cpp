#include "mlep/learn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "json.hpp"
#include "mlep/error.hpp"
#include "mlep/rng.hpp"

namespace mlep {

namespace {

double sigmoid(double z) {
  if (z >= 0) {
    const double e = std::exp(-z);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void check_labels(std::span<const int> labels) {
  for (int y : labels) {
    if (y != 0 && y != 1) throw Error(ErrorCode::kConfig, "labels must be 0 or 1");
  }
}

// Forward pass for one sample; fills the standardised input and hidden
// activations for reuse in backprop.
double forward(const DetectorModel& m, std::span<const double> f, std::vector<double>& x,
               std::vector<double>& hidden) {
  x.resize(m.input_dim);
  hidden.resize(m.hidden_dim);
  for (int i = 0; i < m.input_dim; ++i) x[i] = (f[i] - m.input_mean[i]) * m.input_scale[i];
  double z = m.b2;
  for (int h = 0; h < m.hidden_dim; ++h) {
    const double* row = m.w1.data() + static_cast<std::size_t>(h) * m.input_dim;
    double a = m.b1[h];
    for (int i = 0; i < m.input_dim; ++i) a += row[i] * x[i];
    hidden[h] = std::tanh(a);
    z += m.w2[h] * hidden[h];
  }
  return z;
}

}  // namespace

HistFeature featurize(const LepMap& map) {
  HistFeature f;
  f.reserve(static_cast<std::size_t>(map.channels) * kLevelCount);
  const double total = static_cast<double>(map.plane_size());
  for (int c = 0; c < map.channels; ++c) {
    const auto counts = level_counts(map, c);
    for (auto n : counts) f.push_back(total > 0 ? static_cast<double>(n) / total : 0.0);
  }
  return f;
}

double bce_loss(std::span<const double> preds, std::span<const int> labels) {
  if (preds.empty()) throw Error(ErrorCode::kConfig, "BCE of an empty batch is undefined");
  if (preds.size() != labels.size()) {
    throw Error(ErrorCode::kDimension, "predictions and labels differ in length");
  }
  check_labels(labels);
  double sum = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const double p = std::clamp(preds[i], kBceEpsilon, 1.0 - kBceEpsilon);
    sum += labels[i] == 1 ? std::log(p) : std::log(1.0 - p);
  }
  return -sum / static_cast<double>(preds.size());
}

DetectorModel DetectorModel::zeros(int input_dim, int hidden_dim) {
  if (input_dim < 1 || hidden_dim < 1) {
    throw Error(ErrorCode::kConfig, "model dims must be positive");
  }
  DetectorModel m;
  m.input_dim = input_dim;
  m.hidden_dim = hidden_dim;
  m.input_mean.assign(input_dim, 0.0);
  m.input_scale.assign(input_dim, 1.0);
  m.w1.assign(static_cast<std::size_t>(hidden_dim) * input_dim, 0.0);
  m.b1.assign(hidden_dim, 0.0);
  m.w2.assign(hidden_dim, 0.0);
  return m;
}

DetectorModel DetectorModel::initialized(int input_dim, int hidden_dim, std::uint64_t seed) {
  DetectorModel m = zeros(input_dim, hidden_dim);
  CounterRng rng(derive_seed(seed, 0x1417));
  const double a1 = std::sqrt(6.0 / (input_dim + hidden_dim));
  for (auto& w : m.w1) w = (2.0 * rng.uniform() - 1.0) * a1;
  const double a2 = std::sqrt(6.0 / (hidden_dim + 1));
  for (auto& w : m.w2) w = (2.0 * rng.uniform() - 1.0) * a2;
  return m;
}

std::vector<double> DetectorModel::parameters() const {
  std::vector<double> p;
  p.reserve(parameter_count());
  p.insert(p.end(), w1.begin(), w1.end());
  p.insert(p.end(), b1.begin(), b1.end());
  p.insert(p.end(), w2.begin(), w2.end());
  p.push_back(b2);
  return p;
}

void DetectorModel::set_parameters(std::span<const double> p) {
  if (p.size() != parameter_count()) {
    throw Error(ErrorCode::kDimension, "parameter vector has the wrong length");
  }
  auto it = p.begin();
  std::copy_n(it, w1.size(), w1.begin());
  it += static_cast<std::ptrdiff_t>(w1.size());
  std::copy_n(it, b1.size(), b1.begin());
  it += static_cast<std::ptrdiff_t>(b1.size());
  std::copy_n(it, w2.size(), w2.begin());
  it += static_cast<std::ptrdiff_t>(w2.size());
  b2 = *it;
}

double DetectorModel::logit(std::span<const double> feature) const {
  std::vector<double> x, hidden;
  return forward(*this, feature, x, hidden);
}

void DetectorModel::validate() const {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::kConfig, "model: " + why); };
  if (input_dim < 1 || hidden_dim < 1) fail("dims must be positive");
  if (input_mean.size() != static_cast<std::size_t>(input_dim) ||
      input_scale.size() != static_cast<std::size_t>(input_dim) ||
      w1.size() != static_cast<std::size_t>(input_dim) * hidden_dim ||
      b1.size() != static_cast<std::size_t>(hidden_dim) ||
      w2.size() != static_cast<std::size_t>(hidden_dim)) {
    fail("weight shapes do not match dims");
  }
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double d) { return std::isfinite(d); });
  };
  if (!finite(input_mean) || !finite(input_scale) || !finite(w1) || !finite(b1) ||
      !finite(w2) || !std::isfinite(b2)) {
    fail("non-finite weights");
  }
  if (config) {
    const int k = static_cast<int>(config->scales.factors.size());
    if (input_dim != kLevelCount * k && input_dim != kLevelCount * 3 * k) {
      fail("input_dim " + std::to_string(input_dim) + " does not match 5*C*K for K=" +
           std::to_string(k));
    }
  }
}

std::string DetectorModel::to_json() const {
  nlohmann::json j;
  j["format"] = "mlep-detector";
  j["version"] = 1;
  j["input_dim"] = input_dim;
  j["hidden_dim"] = hidden_dim;
  j["hidden_activation"] = "tanh";
  j["output_activation"] = "sigmoid";
  j["input_mean"] = input_mean;
  j["input_scale"] = input_scale;
  j["w1"] = w1;
  j["b1"] = b1;
  j["w2"] = w2;
  j["b2"] = b2;
  j["training"] = {{"seed", training.seed},
                   {"epochs", training.epochs},
                   {"learning_rate", training.learning_rate},
                   {"batch_size", training.batch_size},
                   {"final_loss", training.final_loss}};
  if (config) j["config"] = nlohmann::json::parse(config->to_json());
  return j.dump(2);
}

DetectorModel DetectorModel::from_json(const std::string& text) {
  DetectorModel m;
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.value("format", std::string()) != "mlep-detector") {
      throw Error(ErrorCode::kParse, "model: not an mlep-detector document");
    }
    m.input_dim = j.at("input_dim").get<int>();
    m.hidden_dim = j.at("hidden_dim").get<int>();
    m.input_mean = j.at("input_mean").get<std::vector<double>>();
    m.input_scale = j.at("input_scale").get<std::vector<double>>();
    m.w1 = j.at("w1").get<std::vector<double>>();
    m.b1 = j.at("b1").get<std::vector<double>>();
    m.w2 = j.at("w2").get<std::vector<double>>();
    m.b2 = j.at("b2").get<double>();
    if (j.contains("training")) {
      const auto& t = j["training"];
      m.training.seed = t.value("seed", std::uint64_t{0});
      m.training.epochs = t.value("epochs", 0);
      m.training.learning_rate = t.value("learning_rate", 0.0);
      m.training.batch_size = t.value("batch_size", 0);
      m.training.final_loss = t.value("final_loss", 0.0);
    }
    if (j.contains("config")) m.config = MlepConfig::from_json(j["config"].dump());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("model: ") + e.what());
  }
  m.validate();
  return m;
}

double predict(const DetectorModel& model, std::span<const double> feature) {
  if (feature.size() != static_cast<std::size_t>(model.input_dim)) {
    throw Error(ErrorCode::kDimension, "feature length " + std::to_string(feature.size()) +
                                           " != model input_dim " +
                                           std::to_string(model.input_dim));
  }
  constexpr double kLo = std::numeric_limits<double>::min();
  constexpr double kHi = 1.0 - std::numeric_limits<double>::epsilon() / 2;
  return std::clamp(sigmoid(model.logit(feature)), kLo, kHi);
}

LossGradient loss_and_gradient(const DetectorModel& m, std::span<const HistFeature> features,
                               std::span<const int> labels) {
  if (features.empty()) throw Error(ErrorCode::kConfig, "empty batch");
  if (features.size() != labels.size()) {
    throw Error(ErrorCode::kDimension, "features and labels differ in length");
  }
  check_labels(labels);
  const auto n = static_cast<double>(features.size());
  LossGradient out;
  out.gradient.assign(m.parameter_count(), 0.0);
  double* g_w1 = out.gradient.data();
  double* g_b1 = g_w1 + m.w1.size();
  double* g_w2 = g_b1 + m.b1.size();
  double* g_b2 = g_w2 + m.w2.size();

  std::vector<double> x, hidden;
  double loss = 0.0;
  for (std::size_t s = 0; s < features.size(); ++s) {
    if (features[s].size() != static_cast<std::size_t>(m.input_dim)) {
      throw Error(ErrorCode::kDimension, "feature length does not match model input_dim");
    }
    const double z = forward(m, features[s], x, hidden);
    const double p = sigmoid(z);
    const int y = labels[s];
    const double pc = std::clamp(p, kBceEpsilon, 1.0 - kBceEpsilon);
    loss -= y == 1 ? std::log(pc) : std::log(1.0 - pc);
    // d(loss)/dz; zero where the clamp is active, matching the clamped loss.
    const double dz = (p > kBceEpsilon && p < 1.0 - kBceEpsilon) ? (p - y) / n : 0.0;
    if (dz == 0.0) continue;
    *g_b2 += dz;
    for (int h = 0; h < m.hidden_dim; ++h) {
      g_w2[h] += dz * hidden[h];
      const double da = dz * m.w2[h] * (1.0 - hidden[h] * hidden[h]);
      g_b1[h] += da;
      double* row = g_w1 + static_cast<std::size_t>(h) * m.input_dim;
      for (int i = 0; i < m.input_dim; ++i) row[i] += da * x[i];
    }
  }
  out.loss = loss / n;
  return out;
}

DetectorModel train(std::span<const HistFeature> features, std::span<const int> labels,
                    const TrainParams& params) {
  if (features.size() != labels.size()) {
    throw Error(ErrorCode::kDimension, "features and labels differ in length");
  }
  if (features.size() < 2) throw Error(ErrorCode::kTraining, "need at least 2 samples");
  check_labels(labels);
  const auto positives = std::count(labels.begin(), labels.end(), 1);
  if (positives == 0 || positives == static_cast<std::ptrdiff_t>(labels.size())) {
    throw Error(ErrorCode::kTraining, "training data contains a single class");
  }
  if (params.epochs < 0 || params.batch_size < 1 || params.hidden_dim < 1 ||
      !(params.learning_rate > 0.0)) {
    throw Error(ErrorCode::kConfig, "invalid training hyper-parameters");
  }
  const int dim = static_cast<int>(features.front().size());
  for (const auto& f : features) {
    if (static_cast<int>(f.size()) != dim) {
      throw Error(ErrorCode::kDimension, "features differ in length");
    }
  }

  DetectorModel model = DetectorModel::initialized(dim, params.hidden_dim, params.seed);
  const auto n = features.size();
  for (int i = 0; i < dim; ++i) {
    double mean = 0.0;
    for (const auto& f : features) mean += f[i];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const auto& f : features) var += (f[i] - mean) * (f[i] - mean);
    const double sd = std::sqrt(var / static_cast<double>(n));
    model.input_mean[i] = mean;
    model.input_scale[i] = sd > 1e-12 ? 1.0 / sd : 1.0;
  }

  std::vector<double> theta = model.parameters();
  std::vector<double> m1(theta.size(), 0.0), m2(theta.size(), 0.0);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<HistFeature> batch_x;
  std::vector<int> batch_y;
  std::uint64_t step = 0;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    CounterRng rng(derive_seed(params.seed, static_cast<std::uint64_t>(epoch), 0xada));
    shuffle_in_place(std::span<std::size_t>(order), rng);
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(params.batch_size)) {
      const std::size_t end = std::min(n, start + static_cast<std::size_t>(params.batch_size));
      batch_x.clear();
      batch_y.clear();
      for (std::size_t k = start; k < end; ++k) {
        batch_x.push_back(features[order[k]]);
        batch_y.push_back(labels[order[k]]);
      }
      const auto lg = loss_and_gradient(model, batch_x, batch_y);
      ++step;
      const double c1 = 1.0 - std::pow(params.beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(params.beta2, static_cast<double>(step));
      for (std::size_t p = 0; p < theta.size(); ++p) {
        const double g = lg.gradient[p];
        m1[p] = params.beta1 * m1[p] + (1.0 - params.beta1) * g;
        m2[p] = params.beta2 * m2[p] + (1.0 - params.beta2) * g * g;
        theta[p] -= params.learning_rate * (m1[p] / c1) / (std::sqrt(m2[p] / c2) + params.adam_epsilon);
      }
      model.set_parameters(theta);
    }
  }

  model.training.seed = params.seed;
  model.training.epochs = params.epochs;
  model.training.learning_rate = params.learning_rate;
  model.training.batch_size = params.batch_size;
  model.training.final_loss = loss_and_gradient(model, features, labels).loss;
  model.validate();
  return model;
}

}  // namespace mlep
