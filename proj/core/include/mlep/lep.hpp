#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "mlep/pyramid.hpp"
#include "mlep/raster.hpp"

namespace mlep {

/// Number of distinct Shannon entropies a 2x2 window can take.
inline constexpr int kLevelCount = 5;

/// Entropy in bits for each level index. Index 1 is the 3+1 partition,
/// 2 - (3/4) log2 3.
inline constexpr std::array<double, kLevelCount> kLevelValues = {
    0.0, 0.8112781244591328, 1.0, 1.5, 2.0};

/// Level index for a 2x2 window, ordered by entropy:
/// 0 = {4}, 1 = {3,1}, 2 = {2,2}, 3 = {2,1,1}, 4 = {1,1,1,1}.
struct EntropyLevel {
  std::uint8_t index = 0;
  double value() const noexcept { return kLevelValues[index]; }
  friend bool operator==(const EntropyLevel&, const EntropyLevel&) = default;
};

/// Shannon entropy (bits) of the multiset {a, b, c, d}, computed directly
/// from value frequencies.
double window_entropy_bits(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d);

/// Reference classifier: direct entropy, then the nearest level.
EntropyLevel window_entropy(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d);

/// Pairwise-equality bits: bit0 a==b, bit1 a==c, bit2 a==d, bit3 b==c,
/// bit4 b==d, bit5 c==d.
constexpr unsigned equality_signature(std::uint8_t a, std::uint8_t b, std::uint8_t c,
                                      std::uint8_t d) noexcept {
  return static_cast<unsigned>(a == b) | static_cast<unsigned>(a == c) << 1 |
         static_cast<unsigned>(a == d) << 2 | static_cast<unsigned>(b == c) << 3 |
         static_cast<unsigned>(b == d) << 4 | static_cast<unsigned>(c == d) << 5;
}

/// Marks signatures no 4-tuple can produce (equality is not transitive there).
inline constexpr std::uint8_t kUnreachableSignature = 0xFF;

/// Signature -> level index table; 15 of the 64 entries are reachable.
const std::array<std::uint8_t, 64>& signature_table() noexcept;

/// Per-channel maps of level indices for 2x2 windows anchored at
/// (i*stride, j*stride) with i*stride+1 < H and j*stride+1 < W.
struct LepMap {
  int height = 0;
  int width = 0;
  int channels = 0;
  int stride = 1;
  std::vector<std::uint8_t> data;  // planar, row-major, values in [0, 4]

  std::size_t plane_size() const noexcept {
    return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  }
  std::span<const std::uint8_t> plane(int c) const noexcept {
    return std::span<const std::uint8_t>(data).subspan(c * plane_size(), plane_size());
  }
  std::uint8_t at(int c, int y, int x) const noexcept {
    return data[c * plane_size() + static_cast<std::size_t>(y) * width + x];
  }

  friend bool operator==(const LepMap&, const LepMap&) = default;
};

/// Number of window anchors along an axis of length n (n >= 2).
constexpr int lep_extent(int n, int stride) noexcept {
  return stride == 1 ? n - 1 : (n - 1 + stride - 1) / stride;
}

/// Reference implementation built on window_entropy.
LepMap lep_naive(const ScaledStack& stack, int stride);

/// Signature lookup-table implementation. Bit-identical to lep_naive.
/// `threads` > 1 splits the work across channels; output does not depend on it.
LepMap lep_fast(const ScaledStack& stack, int stride, int threads = 1);

/// Level counts for one channel.
std::array<std::uint64_t, kLevelCount> level_counts(const LepMap& map, int channel);

/// Visualisation: one grey image per channel, level value v mapped to
/// round(v / 2 * 255), i.e. {0, 103, 128, 191, 255}. Maps smaller than 2x2
/// cannot be represented as images (kDimension).
std::vector<RasterImage> lep_to_u8(const LepMap& map);

/// The u8 value lep_to_u8 uses for each level.
inline constexpr std::array<std::uint8_t, kLevelCount> kLevelGrey = {0, 103, 128, 191, 255};

}  // namespace mlep
