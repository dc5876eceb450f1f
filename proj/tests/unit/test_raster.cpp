#include <gtest/gtest.h>

#include <numeric>

#include "mlep/error.hpp"
#include "mlep/pyramid.hpp"
#include "mlep/raster.hpp"
#include "support.hpp"

namespace {

using mlep::CenterCrop;
using mlep::InterpKernel;
using mlep::RandomCrop;
using mlep::RasterImage;

RasterImage iota_image(int h, int w, int c) {
  std::vector<std::uint8_t> data(static_cast<std::size_t>(h) * w * c);
  std::iota(data.begin(), data.end(), 0);
  return RasterImage(h, w, c, data);
}

TEST(Raster, RejectsBadShapes) {
  EXPECT_THROW(RasterImage(1, 4, 1), mlep::Error);
  EXPECT_THROW(RasterImage(4, 4, 2), mlep::Error);
  EXPECT_THROW(RasterImage(2, 2, 1, std::vector<std::uint8_t>(3)), mlep::Error);
  try {
    RasterImage(2, 2, 4);
  } catch (const mlep::Error& e) {
    EXPECT_EQ(e.code(), mlep::ErrorCode::kDimension);
  }
}

TEST(Raster, InterleavedRoundTrip) {
  const std::vector<std::uint8_t> hwc = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  const auto img = RasterImage::from_interleaved(2, 2, 3, hwc);
  EXPECT_EQ(img.at(0, 0, 0), 1);
  EXPECT_EQ(img.at(1, 0, 0), 2);
  EXPECT_EQ(img.at(2, 1, 1), 12);
  EXPECT_EQ(img.at(0, 0, 1), 4);
  EXPECT_EQ(img.to_interleaved(), hwc);
}

TEST(Raster, FullSizeCropIsIdentity) {
  const auto img = iota_image(4, 4, 1);
  EXPECT_EQ(mlep::crop(img, 4, 4, CenterCrop{}), img);
}

TEST(Raster, CenterCropTakesMiddle) {
  const auto img = iota_image(4, 4, 1);
  const auto out = mlep::crop(img, 2, 2, CenterCrop{});
  EXPECT_EQ(out.at(0, 0, 0), img.at(0, 1, 1));
  EXPECT_EQ(out.at(0, 1, 1), img.at(0, 2, 2));
  const auto off = mlep::crop_offset(5, 7, 2, 2, CenterCrop{});
  EXPECT_EQ(off.top, 1);
  EXPECT_EQ(off.left, 2);
}

TEST(Raster, RandomCropIsSeededAndInRange) {
  const auto img = iota_image(5, 5, 3);
  EXPECT_EQ(mlep::crop(img, 2, 2, RandomCrop{11}), mlep::crop(img, 2, 2, RandomCrop{11}));
  bool moved = false;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto off = mlep::crop_offset(5, 5, 2, 2, RandomCrop{s});
    ASSERT_GE(off.top, 0);
    ASSERT_LE(off.top, 3);
    ASSERT_GE(off.left, 0);
    ASSERT_LE(off.left, 3);
    moved = moved || off.top != 1 || off.left != 1;
  }
  EXPECT_TRUE(moved);
}

TEST(Raster, OversizedCropThrows) {
  const auto img = iota_image(4, 4, 1);
  EXPECT_THROW(mlep::crop(img, 5, 4, CenterCrop{}), mlep::Error);
}

TEST(Raster, ResizeConstantStaysConstant) {
  RasterImage img(6, 9, 3);
  std::fill(img.data().begin(), img.data().end(), 17);
  for (auto k : {InterpKernel::kNearest, InterpKernel::kBilinear, InterpKernel::kBicubic}) {
    for (auto [h, w] : {std::pair{2, 2}, std::pair{13, 5}, std::pair{40, 40}}) {
      const auto out = mlep::resize_to(img, h, w, k);
      for (auto v : out.data()) ASSERT_EQ(v, 17);
    }
  }
}

TEST(Raster, ResizeSameSizeIsIdentity) {
  const auto img = mlep::testing::noise_image(3, 4, 4, 3);
  for (auto k : {InterpKernel::kNearest, InterpKernel::kBilinear, InterpKernel::kBicubic}) {
    EXPECT_EQ(mlep::resize_to(img, 4, 4, k), img);
  }
}

TEST(Raster, ResizeRampMatchesScalarOracle) {
  RasterImage img(4, 4, 1);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) img.at(0, y, x) = static_cast<std::uint8_t>(85 * x);
  const auto out = mlep::resize_to(img, 4, 2, InterpKernel::kBilinear);
  const auto oracle = mlep::testing::bilinear_oracle(img.plane(0), 4, 4, 4, 2, 1, 1, 2, 1);
  ASSERT_EQ(std::vector<std::uint8_t>(out.plane(0).begin(), out.plane(0).end()), oracle);
  for (int y = 0; y < 4; ++y) {
    EXPECT_EQ(out.at(0, y, 0), 43);
    EXPECT_EQ(out.at(0, y, 1), 213);
  }
}

}  // namespace
