#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace mlep {

enum class InterpKernel;

/// H x W x C unsigned 8-bit image stored as C row-major planes
/// (`data[c*H*W + y*W + x]`). C is 1 or 3; H and W are at least 2 so that
/// at least one 2x2 window exists.
class RasterImage {
 public:
  RasterImage(int height, int width, int channels);
  RasterImage(int height, int width, int channels, std::vector<std::uint8_t> data);

  /// Builds a planar image from interleaved HWC samples (decoder output).
  static RasterImage from_interleaved(int height, int width, int channels,
                                      std::span<const std::uint8_t> hwc);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  int channels() const noexcept { return channels_; }
  std::size_t plane_size() const noexcept {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }

  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::span<std::uint8_t> data() noexcept { return data_; }
  std::span<const std::uint8_t> plane(int c) const noexcept {
    return std::span<const std::uint8_t>(data_).subspan(c * plane_size(), plane_size());
  }
  std::span<std::uint8_t> plane(int c) noexcept {
    return std::span<std::uint8_t>(data_).subspan(c * plane_size(), plane_size());
  }

  std::uint8_t at(int c, int y, int x) const noexcept {
    return data_[c * plane_size() + static_cast<std::size_t>(y) * width_ + x];
  }
  std::uint8_t& at(int c, int y, int x) noexcept {
    return data_[c * plane_size() + static_cast<std::size_t>(y) * width_ + x];
  }

  std::vector<std::uint8_t> to_interleaved() const;

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  int height_;
  int width_;
  int channels_;
  std::vector<std::uint8_t> data_;
};

struct CenterCrop {
  friend bool operator==(const CenterCrop&, const CenterCrop&) = default;
};

struct RandomCrop {
  std::uint64_t seed = 0;
  friend bool operator==(const RandomCrop&, const RandomCrop&) = default;
};

using CropMode = std::variant<CenterCrop, RandomCrop>;

/// Offset chosen by `crop` for a given mode; exposed for tests and logging.
struct CropOffset {
  int top;
  int left;
};
CropOffset crop_offset(int src_h, int src_w, int h, int w, const CropMode& mode);

/// Contiguous h x w copy. Center mode uses offset (floor((H-h)/2),
/// floor((W-w)/2)); random mode draws each offset uniformly from the valid
/// range using the seed. Throws kDimension when the request exceeds the source.
RasterImage crop(const RasterImage& img, int h, int w, const CropMode& mode);

/// Resample to exactly h x w with the shared pyramid sampling convention.
RasterImage resize_to(const RasterImage& img, int h, int w, InterpKernel interp);

}  // namespace mlep
