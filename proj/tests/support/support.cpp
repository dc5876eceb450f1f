#include "support.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <unistd.h>

#include "mlep/file_util.hpp"
#include "mlep/image_codec.hpp"
#include "mlep/rng.hpp"

namespace mlep::testing {

namespace fs = std::filesystem;

std::array<double, kLevelCount> level_probabilities(std::uint64_t n) {
  const double a = static_cast<double>(n);
  const std::array<double, kLevelCount> counts = {
      a,                                    // {4}
      4.0 * a * (a - 1),                    // {3,1}: value pair, position of the single
      3.0 * a * (a - 1),                    // {2,2}: unordered value pair, 6 arrangements
      6.0 * a * (a - 1) * (a - 2),          // {2,1,1}: doubled value, two others, 12 arrangements
      a * (a - 1) * (a - 2) * (a - 3),      // all distinct
  };
  const double total = a * a * a * a;
  std::array<double, kLevelCount> p{};
  for (int i = 0; i < kLevelCount; ++i) p[i] = counts[i] / total;
  return p;
}

std::array<std::uint64_t, kLevelCount> level_counts_bruteforce(int n) {
  std::array<std::uint64_t, kLevelCount> counts{};
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          std::array<int, 4> s = {a, b, c, d};
          std::sort(s.begin(), s.end());
          std::array<int, 4> v = s;
          const int distinct = static_cast<int>(std::unique(v.begin(), v.end()) - v.begin());
          int level = 4;
          if (distinct == 1) {
            level = 0;
          } else if (distinct == 2) {
            level = (s[0] == s[2] || s[1] == s[3]) ? 1 : 2;  // {3,1} vs {2,2}
          } else if (distinct == 3) {
            level = 3;
          }
          ++counts[level];
        }
  return counts;
}

namespace {

struct Tap {
  int i0;
  int i1;
  std::int64_t w0;  // weights in units of 1/den
  std::int64_t w1;
  std::int64_t den;
};

// Source position of destination index d: ((2d+1)*num - den) / (2*den),
// clamped to [0, n-1].
Tap bilinear_tap(int d, int n, std::int64_t num, std::int64_t den) {
  const std::int64_t q = 2 * den;
  std::int64_t p = (2 * static_cast<std::int64_t>(d) + 1) * num - den;
  p = std::clamp<std::int64_t>(p, 0, static_cast<std::int64_t>(n - 1) * q);
  const auto i0 = static_cast<int>(p / q);
  const std::int64_t frac = p - static_cast<std::int64_t>(i0) * q;
  return Tap{i0, std::min(i0 + 1, n - 1), q - frac, frac, q};
}

}  // namespace

std::vector<std::uint8_t> bilinear_oracle(std::span<const std::uint8_t> src, int h, int w,
                                          int out_h, int out_w, std::int64_t ratio_num_y,
                                          std::int64_t ratio_den_y, std::int64_t ratio_num_x,
                                          std::int64_t ratio_den_x) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(out_h) * out_w);
  for (int y = 0; y < out_h; ++y) {
    const Tap ty = bilinear_tap(y, h, ratio_num_y, ratio_den_y);
    for (int x = 0; x < out_w; ++x) {
      const Tap tx = bilinear_tap(x, w, ratio_num_x, ratio_den_x);
      auto v = [&](int yy, int xx) {
        return static_cast<std::int64_t>(src[static_cast<std::size_t>(yy) * w + xx]);
      };
      const std::int64_t num = ty.w0 * (tx.w0 * v(ty.i0, tx.i0) + tx.w1 * v(ty.i0, tx.i1)) +
                               ty.w1 * (tx.w0 * v(ty.i1, tx.i0) + tx.w1 * v(ty.i1, tx.i1));
      const std::int64_t den = ty.den * tx.den;
      const std::int64_t rounded = (2 * num + den) / (2 * den);
      out[static_cast<std::size_t>(y) * out_w + x] =
          static_cast<std::uint8_t>(std::clamp<std::int64_t>(rounded, 0, 255));
    }
  }
  return out;
}

std::vector<std::complex<double>> direct_dft2(std::span<const double> grid, int h, int w) {
  std::vector<std::complex<double>> out(static_cast<std::size_t>(h) * w);
  for (int u = 0; u < h; ++u)
    for (int v = 0; v < w; ++v) {
      std::complex<double> acc = 0.0;
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          const double angle = -2.0 * std::numbers::pi *
                               (static_cast<double>(u) * y / h + static_cast<double>(v) * x / w);
          acc += grid[static_cast<std::size_t>(y) * w + x] * std::polar(1.0, angle);
        }
      out[static_cast<std::size_t>(u) * w + v] = acc;
    }
  return out;
}

double average_precision_sweep(std::span<const double> scores, std::span<const int> labels) {
  std::vector<double> thresholds(scores.begin(), scores.end());
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  const auto positives = std::count(labels.begin(), labels.end(), 1);
  double sum = 0.0;
  long prev_tp = 0;
  for (double t : thresholds) {
    long tp = 0;
    long predicted = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] >= t) {
        ++predicted;
        tp += labels[i];
      }
    }
    // Recall increment times precision at this threshold.
    sum += static_cast<double>(tp - prev_tp) * (static_cast<double>(tp) / predicted);
    prev_tp = tp;
  }
  return sum / static_cast<double>(positives);
}

RasterImage synthetic_real(std::uint64_t seed, int size, int channels) {
  CounterRng rng(derive_seed(seed, 0x7ea1));
  RasterImage img(size, size, channels);
  const double fx = 0.05 + 0.25 * rng.uniform();
  const double fy = 0.05 + 0.25 * rng.uniform();
  const double amp = 30.0 + 40.0 * rng.uniform();
  const double noise = 4.0 + 2.0 * rng.uniform();
  for (int c = 0; c < channels; ++c) {
    const double phase_x = 6.283 * rng.uniform();
    const double phase_y = 6.283 * rng.uniform();
    const double fine = 0.6 + 0.5 * rng.uniform();
    for (int y = 0; y < size; ++y)
      for (int x = 0; x < size; ++x) {
        const double smooth = amp * std::sin(fx * x + phase_x) * std::cos(fy * y + phase_y) +
                              0.25 * amp * std::sin(fine * (x + y) + phase_y);
        const double jitter = noise * (2.0 * rng.uniform() - 1.0);
        img.at(c, y, x) = static_cast<std::uint8_t>(
            std::clamp(std::lround(128.0 + smooth + jitter), 0L, 255L));
      }
  }
  return img;
}

RasterImage synthetic_fake(const RasterImage& real) {
  const RasterImage down = downsample(real, ScaleFactor(1, 2), InterpKernel::kBilinear);
  const RasterImage up = upsample(down, real.height(), real.width(), InterpKernel::kBilinear);
  const int h = up.height();
  const int w = up.width();
  RasterImage tmp(h, w, up.channels());
  RasterImage out(h, w, up.channels());
  for (int c = 0; c < up.channels(); ++c) {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const int s = up.at(c, y, std::max(x - 1, 0)) + 2 * up.at(c, y, x) +
                      up.at(c, y, std::min(x + 1, w - 1));
        tmp.at(c, y, x) = static_cast<std::uint8_t>((s + 2) / 4);
      }
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const int s = tmp.at(c, std::max(y - 1, 0), x) + 2 * tmp.at(c, y, x) +
                      tmp.at(c, std::min(y + 1, h - 1), x);
        out.at(c, y, x) = static_cast<std::uint8_t>((s + 2) / 4);
      }
  }
  return out;
}

RasterImage noise_image(std::uint64_t seed, int h, int w, int channels) {
  RasterImage img(h, w, channels);
  CounterRng rng(seed);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng.next() >> 56);
  return img;
}

ScaledStack random_stack(std::uint64_t seed, int h, int w, int channels, int alphabet) {
  ScaledStack s(h, w, channels);
  CounterRng rng(seed);
  for (auto& v : s.data) v = static_cast<std::uint8_t>(rng.below(static_cast<std::uint64_t>(alphabet)));
  return s;
}

fs::path write_synthetic_corpus(const fs::path& dir, int n_per_class, int n_train, int size,
                                std::uint64_t seed) {
  fs::create_directories(dir);
  std::ostringstream csv;
  csv << "path,label,split\n";
  for (int i = 0; i < n_per_class; ++i) {
    const RasterImage real = synthetic_real(derive_seed(seed, static_cast<std::uint64_t>(i)), size);
    const RasterImage fake = synthetic_fake(real);
    const std::string split = i < n_train ? "train" : "test";
    const std::string real_name = "real_" + std::to_string(i) + ".png";
    const std::string fake_name = "fake_" + std::to_string(i) + ".png";
    write_file_atomic(dir / real_name, encode_png(real));
    write_file_atomic(dir / fake_name, encode_png(fake));
    csv << real_name << ",0," << split << "\n" << fake_name << ",1," << split << "\n";
  }
  const fs::path manifest = dir / "manifest.csv";
  write_file_atomic(manifest, csv.str());
  return manifest;
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<unsigned> counter{0};
  const std::uint64_t nonce = derive_seed(static_cast<std::uint64_t>(::getpid()), counter++);
  path_ = fs::temp_directory_path() /
          (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(nonce % 1000000007));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

fs::path fixture_dir() { return fs::path(MLEP_FIXTURE_DIR); }

}  // namespace mlep::testing
