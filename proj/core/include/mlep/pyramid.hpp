#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mlep/raster.hpp"

namespace mlep {

enum class InterpKernel { kNearest, kBilinear, kBicubic };

std::string_view to_string(InterpKernel k);
/// Accepts "nearest", "bilinear", "bicubic"; throws kConfig otherwise.
InterpKernel parse_interp(std::string_view name);

/// Catmull-Rom coefficient used by the bicubic kernel.
inline constexpr double kBicubicA = -0.5;

/// Exact rational scale factor num/den in (0, 1], den <= kMaxDenominator.
class ScaleFactor {
 public:
  static constexpr std::uint32_t kMaxDenominator = 65536;

  constexpr ScaleFactor() = default;
  ScaleFactor(std::uint32_t num, std::uint32_t den);

  /// Parses "1", "0.5", ".125", "1/4". Decimals are kept exact (0.3 is 3/10)
  /// when the reduced denominator fits; longer decimals such as
  /// "0.3333333333" become the closest fraction that does (1/3).
  static ScaleFactor parse(std::string_view text);
  /// Shortest round-trip decimal of `value`, then parse().
  static ScaleFactor from_double(double value);

  std::uint32_t num() const noexcept { return num_; }
  std::uint32_t den() const noexcept { return den_; }
  double value() const noexcept { return static_cast<double>(num_) / den_; }
  bool is_identity() const noexcept { return num_ == den_; }

  /// floor(s * n), computed exactly.
  int apply(int n) const noexcept;

  /// "1", "1/2", "3/10".
  std::string to_string() const;

  friend bool operator==(const ScaleFactor&, const ScaleFactor&) = default;

 private:
  std::uint32_t num_ = 1;
  std::uint32_t den_ = 1;
};

struct ScaleSet {
  std::vector<ScaleFactor> factors;

  /// Non-empty, first factor is 1, and every floor(s*H), floor(s*W) >= 2.
  /// Throws kConfig.
  void validate(int height, int width) const;
  /// Parses a comma-separated list, e.g. "1,0.5,0.25".
  static ScaleSet parse(std::string_view csv);
  std::string to_string() const;

  friend bool operator==(const ScaleSet&, const ScaleSet&) = default;
};

/// H x W x (C*K) stack of u8 planes ordered scale-major then colour:
/// (s1:R,G,B, s2:R,G,B, ...).
struct ScaledStack {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<std::uint8_t> data;

  ScaledStack() = default;
  ScaledStack(int h, int w, int c)
      : height(h), width(w), channels(c),
        data(static_cast<std::size_t>(h) * w * c, 0) {}

  /// A single-scale stack holding the image planes unchanged.
  static ScaledStack from_image(const RasterImage& img);

  std::size_t plane_size() const noexcept {
    return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  }
  std::span<const std::uint8_t> plane(int c) const noexcept {
    return std::span<const std::uint8_t>(data).subspan(c * plane_size(), plane_size());
  }
  std::span<std::uint8_t> plane(int c) noexcept {
    return std::span<std::uint8_t>(data).subspan(c * plane_size(), plane_size());
  }

  friend bool operator==(const ScaledStack&, const ScaledStack&) = default;
};

// Sampling convention shared by every resampler in the library: half-pixel
// centres, no corner alignment. A destination index d maps to the source
// coordinate (d + 0.5) * ratio - 0.5, clamped to [0, n - 1]; outer bicubic
// taps replicate the border. Positions and weights are exact rationals and
// sums are accumulated in integers, so the result is the exact value rounded
// half away from zero and clamped to [0, 255] on every platform. Image sides
// are limited to kMaxResampleSide.

inline constexpr int kMaxResampleSide = 65536;

/// Output is (floor(s*H), floor(s*W)); ratio is exactly 1/s.
RasterImage downsample(const RasterImage& img, ScaleFactor s, InterpKernel k);

/// Output is exactly (h, w) with h >= H, w >= W; ratio is H/h (resp. W/w).
RasterImage upsample(const RasterImage& img, int h, int w, InterpKernel k);

/// Arbitrary target size; ratio is H/h (resp. W/w).
RasterImage resample(const RasterImage& img, int h, int w, InterpKernel k);

/// Up(Down(img, s_k)) for every scale, concatenated scale-major. The scale-1
/// block is a copy of the input.
ScaledStack build_stack(const RasterImage& img, const ScaleSet& scales, InterpKernel k);

}  // namespace mlep
