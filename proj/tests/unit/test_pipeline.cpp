#include <gtest/gtest.h>

#include "mlep/error.hpp"
#include "mlep/image_codec.hpp"
#include "mlep/pipeline.hpp"
#include "mlep/shuffle.hpp"
#include "support.hpp"

namespace {

using mlep::MlepConfig;
using mlep::RasterImage;
namespace mt = mlep::testing;

TEST(Config, DefaultsMatchPublishedSetting) {
  const MlepConfig cfg;
  EXPECT_EQ(cfg.patch_size, 2);
  EXPECT_EQ(cfg.scales.to_string(), mlep::ScaleSet::parse("1,0.5,0.25").to_string());
  EXPECT_EQ(cfg.interp, mlep::InterpKernel::kBilinear);
  EXPECT_EQ(cfg.stride, 1);
  EXPECT_EQ(cfg.input_size, 224);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, RejectsUnsupportedValues) {
  for (int l : {0, 1, 3, 16}) {
    MlepConfig cfg;
    cfg.patch_size = l;
    try {
      cfg.validate();
      FAIL() << l;
    } catch (const mlep::Error& e) {
      EXPECT_EQ(e.code(), mlep::ErrorCode::kConfig);
    }
  }
  MlepConfig cfg;
  cfg.stride = 3;
  EXPECT_THROW(cfg.validate(), mlep::Error);
  cfg = MlepConfig{};
  cfg.input_size = 1;
  EXPECT_THROW(cfg.validate(), mlep::Error);
  cfg = MlepConfig{};
  cfg.input_size = 12;
  cfg.scales = mlep::ScaleSet::parse("1,0.125");
  EXPECT_THROW(cfg.validate(), mlep::Error);
}

TEST(Config, JsonRoundTrip) {
  MlepConfig cfg;
  cfg.patch_size = 4;
  cfg.scales = mlep::ScaleSet::parse("1,0.5,0.3");
  cfg.interp = mlep::InterpKernel::kBicubic;
  cfg.stride = 2;
  cfg.seed = 123456789012345ULL;
  cfg.input_size = 0;
  cfg.crop = mlep::RandomCrop{99};
  EXPECT_EQ(MlepConfig::from_json(cfg.to_json()), cfg);
  EXPECT_EQ(MlepConfig::from_json(MlepConfig{}.to_json()), MlepConfig{});
  EXPECT_THROW(MlepConfig::from_json("{}"), mlep::Error);
}

TEST(Config, NumericScalesAccepted) {
  const auto cfg = MlepConfig::from_json(
      R"({"patch_size":2,"scales":[1,0.5,0.25],"interp":"bilinear","stride":1,"seed":0,)"
      R"("input_size":224,"crop":{"mode":"center"}})");
  EXPECT_EQ(cfg, MlepConfig{});
}

TEST(Pipeline, PrepareResizesShorterSideAndCrops) {
  const auto img = mt::noise_image(1, 100, 150, 3);
  MlepConfig cfg;
  cfg.input_size = 64;
  const auto out = mlep::prepare_input(img, cfg);
  EXPECT_EQ(out.height(), 64);
  EXPECT_EQ(out.width(), 64);
  const auto resized = mlep::resize_to(img, 64, 96, mlep::InterpKernel::kBilinear);
  EXPECT_EQ(out, mlep::crop(resized, 64, 64, mlep::CenterCrop{}));
  cfg.input_size = 0;
  EXPECT_EQ(mlep::prepare_input(img, cfg), img);
}

TEST(Pipeline, DefaultDimsFor224Rgb) {
  const auto img = mt::synthetic_real(3);
  const auto map = mlep::extract_mlep(img, MlepConfig{});
  EXPECT_EQ(map.height, 223);
  EXPECT_EQ(map.width, 223);
  EXPECT_EQ(map.channels, 9);
}

TEST(Pipeline, ConstantImageGivesLevelZero) {
  RasterImage img(300, 260, 3);
  std::fill(img.data().begin(), img.data().end(), 200);
  const auto map = mlep::extract_mlep(img, MlepConfig{});
  EXPECT_EQ(map.height, 223);
  EXPECT_EQ(map.channels, 9);
  for (auto v : map.data) ASSERT_EQ(v, 0);
}

TEST(Pipeline, Deterministic) {
  const auto img = mlep::read_image(mt::fixture_dir() / "textured_224.jpg");
  MlepConfig cfg;
  cfg.seed = 31;
  EXPECT_EQ(mlep::extract_mlep(img, cfg, 1), mlep::extract_mlep(img, cfg, 4));
  cfg.seed = 32;
  EXPECT_NE(mlep::extract_mlep(img, cfg), mlep::extract_mlep(img, MlepConfig{}));
}

TEST(Pipeline, StackComposesStages) {
  const auto img = mt::noise_image(4, 70, 70, 3);
  MlepConfig cfg;
  cfg.input_size = 0;
  cfg.patch_size = 8;
  cfg.seed = 5;
  // 70 is cropped to 64 at offset 3 before shuffling.
  const auto base = mlep::crop(img, 64, 64, mlep::CenterCrop{});
  const auto shuffled = mlep::shuffle_image(base, 8, 5).image;
  EXPECT_EQ(mlep::mlep_stack(img, cfg), mlep::build_stack(shuffled, cfg.scales, cfg.interp));
}

TEST(Pipeline, ErrorsNameTheStage) {
  const auto img = mt::noise_image(4, 6, 6, 1);
  MlepConfig cfg;
  cfg.input_size = 0;  // 6x6 with scale 1/4 gives 1x1
  try {
    mlep::extract_mlep(img, cfg);
    FAIL();
  } catch (const mlep::Error& e) {
    EXPECT_EQ(e.code(), mlep::ErrorCode::kConfig);
    EXPECT_EQ(std::string(e.what()).rfind("resample: ", 0), 0u) << e.what();
  }
  cfg.patch_size = 3;
  try {
    mlep::extract_mlep(img, cfg);
    FAIL();
  } catch (const mlep::Error& e) {
    EXPECT_EQ(std::string(e.what()).rfind("config: ", 0), 0u) << e.what();
  }
}

}  // namespace
