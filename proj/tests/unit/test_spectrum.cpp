#include <gtest/gtest.h>

#include <cmath>

#include "mlep/error.hpp"
#include "mlep/rng.hpp"
#include "mlep/spectrum.hpp"
#include "support.hpp"

namespace {

using mlep::RasterImage;
namespace mt = mlep::testing;

std::vector<double> random_grid(std::uint64_t seed, int h, int w) {
  mlep::CounterRng rng(seed);
  std::vector<double> g(static_cast<std::size_t>(h) * w);
  for (auto& v : g) v = rng.uniform() * 255.0;
  return g;
}

TEST(Fft, MatchesDirectDftOnPowerOfTwoGrids) {
  for (auto [h, w] : {std::pair{4, 8}, std::pair{8, 8}, std::pair{16, 2}, std::pair{2, 32}}) {
    const auto g = random_grid(static_cast<std::uint64_t>(h * 100 + w), h, w);
    const auto fast = mlep::dft2(g, h, w);
    const auto slow = mt::direct_dft2(g, h, w);
    ASSERT_FALSE(fast.padded());
    for (std::size_t i = 0; i < slow.size(); ++i) {
      EXPECT_NEAR(std::abs(fast.data[i] - slow[i]), 0.0, 1e-8 * (1 + std::abs(slow[i])));
    }
  }
}

TEST(Fft, ConstantGridIsDcOnly) {
  const int h = 8, w = 16;
  const std::vector<double> g(static_cast<std::size_t>(h) * w, 3.0);
  const auto f = mlep::dft2(g, h, w);
  EXPECT_NEAR(f.at(0, 0).real(), 3.0 * h * w, 1e-9 * 3.0 * h * w);
  for (std::size_t i = 1; i < f.data.size(); ++i) EXPECT_NEAR(std::abs(f.data[i]), 0.0, 1e-9 * 3.0 * h * w);
}

TEST(Fft, ImpulseIsFlat) {
  std::vector<double> g(64, 0.0);
  g[0] = 1.0;
  const auto f = mlep::dft2(g, 8, 8);
  for (const auto& v : f.data) EXPECT_NEAR(std::abs(v), 1.0, 1e-12);
}

TEST(Fft, PadsToPowerOfTwoAndInverts) {
  const auto g = random_grid(5, 5, 6);
  const auto f = mlep::dft2(g, 5, 6);
  EXPECT_TRUE(f.padded());
  EXPECT_EQ(f.height, 8);
  EXPECT_EQ(f.width, 8);
  EXPECT_EQ(f.source_height, 5);
  const auto back = mlep::idft2(f);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      const double expect = (y < 5 && x < 6) ? g[static_cast<std::size_t>(y) * 6 + x] : 0.0;
      EXPECT_NEAR(back.at(y, x).real(), expect, 1e-9);
      EXPECT_NEAR(back.at(y, x).imag(), 0.0, 1e-9);
    }
}

TEST(Fft, RejectsNonPowerOfTwo) {
  std::vector<std::complex<double>> v(6);
  EXPECT_THROW(mlep::fft_inplace(v, false), mlep::Error);
}

TEST(DiffReport, IdenticalPairIsAllZero) {
  const auto img = mt::synthetic_real(1, 64);
  mlep::MlepConfig cfg;
  cfg.input_size = 0;
  const auto r = mlep::diff_report(img, img, cfg);
  for (const auto* im : {&r.pixel_diff, &r.entropy_diff, &r.spectrum_diff})
    for (auto v : im->data()) ASSERT_EQ(v, 0);
  EXPECT_EQ(r.stats.pixel, 0.0);
  EXPECT_EQ(r.stats.entropy, 0.0);
  EXPECT_EQ(r.stats.spectrum, 0.0);
  EXPECT_EQ(r.pixel_diff.height(), 64);
  EXPECT_EQ(r.entropy_diff.height(), 63);
  EXPECT_EQ(r.entropy_diff.channels(), 3);
  EXPECT_EQ(r.spectrum_diff.height(), 64);
}

TEST(DiffReport, OnePixelEditIsLocal) {
  const auto real = mt::synthetic_real(2, 64);
  auto fake = real;
  fake.at(1, 30, 40) = static_cast<std::uint8_t>(real.at(1, 30, 40) ^ 0x80);
  mlep::MlepConfig cfg;
  cfg.input_size = 0;
  cfg.scales = mlep::ScaleSet::parse("1");
  const auto r = mlep::diff_report(real, fake, cfg);
  int pixel_nonzero = 0;
  for (auto v : r.pixel_diff.data()) pixel_nonzero += v != 0;
  EXPECT_EQ(pixel_nonzero, 1);
  EXPECT_NE(r.pixel_diff.at(1, 30, 40), 0);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < r.entropy_diff.height(); ++y)
      for (int x = 0; x < r.entropy_diff.width(); ++x) {
        if (r.entropy_diff.at(c, y, x) != 0) {
          EXPECT_EQ(c, 1);
          EXPECT_TRUE((y == 29 || y == 30) && (x == 39 || x == 40)) << y << "," << x;
        }
      }
  EXPECT_GT(r.stats.spectrum, 0.0);
}

TEST(DiffReport, ShapeMismatchThrows) {
  mlep::MlepConfig cfg;
  cfg.input_size = 0;
  EXPECT_THROW(mlep::diff_report(mt::noise_image(1, 8, 8, 3), mt::noise_image(1, 8, 9, 3), cfg),
               mlep::Error);
}

TEST(DiffReport, StatsJsonHasAllFields) {
  mlep::MlepConfig cfg;
  cfg.input_size = 0;
  const auto real = mt::synthetic_real(4, 32);
  const auto r = mlep::diff_report(real, mt::synthetic_fake(real), cfg);
  const auto json = r.stats_json();
  for (const char* key : {"pixel_mean_abs_diff", "entropy_mean_abs_diff", "spectrum_mean_abs_diff"}) {
    EXPECT_NE(json.find(key), std::string::npos) << key;
  }
  EXPECT_GT(r.stats.entropy, r.stats.pixel);
}

}  // namespace
