#include "mlep/raster.hpp"

#include <string>

#include "mlep/error.hpp"
#include "mlep/pyramid.hpp"
#include "mlep/rng.hpp"

namespace mlep {

namespace {

void check_shape(int height, int width, int channels) {
  if (channels != 1 && channels != 3) {
    throw Error(ErrorCode::kDimension,
                "image must have 1 or 3 channels, got " + std::to_string(channels));
  }
  if (height < 2 || width < 2) {
    throw Error(ErrorCode::kDimension, "image must be at least 2x2, got " +
                                           std::to_string(height) + "x" +
                                           std::to_string(width));
  }
}

}  // namespace

RasterImage::RasterImage(int height, int width, int channels)
    : height_(height), width_(width), channels_(channels) {
  check_shape(height, width, channels);
  data_.assign(plane_size() * channels, 0);
}

RasterImage::RasterImage(int height, int width, int channels,
                         std::vector<std::uint8_t> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
  check_shape(height, width, channels);
  if (data_.size() != plane_size() * channels) {
    throw Error(ErrorCode::kDimension,
                "pixel buffer holds " + std::to_string(data_.size()) +
                    " bytes, expected " + std::to_string(plane_size() * channels));
  }
}

RasterImage RasterImage::from_interleaved(int height, int width, int channels,
                                          std::span<const std::uint8_t> hwc) {
  RasterImage img(height, width, channels);
  if (hwc.size() != img.data_.size()) {
    throw Error(ErrorCode::kDimension, "interleaved buffer size mismatch");
  }
  const std::size_t n = img.plane_size();
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < channels; ++c) {
      img.data_[c * n + i] = hwc[i * channels + c];
    }
  }
  return img;
}

std::vector<std::uint8_t> RasterImage::to_interleaved() const {
  std::vector<std::uint8_t> out(data_.size());
  const std::size_t n = plane_size();
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < channels_; ++c) {
      out[i * channels_ + c] = data_[c * n + i];
    }
  }
  return out;
}

CropOffset crop_offset(int src_h, int src_w, int h, int w, const CropMode& mode) {
  if (h > src_h || w > src_w) {
    throw Error(ErrorCode::kDimension,
                "crop " + std::to_string(h) + "x" + std::to_string(w) +
                    " exceeds source " + std::to_string(src_h) + "x" +
                    std::to_string(src_w));
  }
  if (std::holds_alternative<CenterCrop>(mode)) {
    return {(src_h - h) / 2, (src_w - w) / 2};
  }
  CounterRng rng(std::get<RandomCrop>(mode).seed);
  const int top = static_cast<int>(rng.below(static_cast<std::uint64_t>(src_h - h) + 1));
  const int left = static_cast<int>(rng.below(static_cast<std::uint64_t>(src_w - w) + 1));
  return {top, left};
}

RasterImage crop(const RasterImage& img, int h, int w, const CropMode& mode) {
  const CropOffset off = crop_offset(img.height(), img.width(), h, w, mode);
  RasterImage out(h, w, img.channels());
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        out.at(c, y, x) = img.at(c, y + off.top, x + off.left);
      }
    }
  }
  return out;
}

RasterImage resize_to(const RasterImage& img, int h, int w, InterpKernel interp) {
  if (h < 2 || w < 2) {
    throw Error(ErrorCode::kDimension, "resize target must be at least 2x2");
  }
  return resample(img, h, w, interp);
}

}  // namespace mlep
