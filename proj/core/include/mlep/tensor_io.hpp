#pragma once

// ".mlep" feature tensor format, all integers little-endian:
//
//   offset  size  field
//   0       4     magic "MLEP"
//   4       1     version, currently 1
//   5       1     dtype: 0 = level index u8, 1 = entropy bits f32
//   6       2     reserved, must be zero
//   8       4     height  (u32)
//   12      4     width   (u32)
//   16      4     channels (u32)
//   20      ...   payload, row-major over (height, width, channels), i.e.
//                 channel index varies fastest

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "mlep/lep.hpp"

namespace mlep {

inline constexpr std::size_t kTensorHeaderSize = 20;
inline constexpr std::uint8_t kTensorVersion = 1;

enum class TensorDtype : std::uint8_t { kLevelU8 = 0, kF32 = 1 };

struct FeatureTensor {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::uint32_t channels = 0;
  TensorDtype dtype = TensorDtype::kLevelU8;
  std::vector<std::uint8_t> payload;  // little-endian elements, HWC order

  static std::size_t element_size(TensorDtype dtype) noexcept {
    return dtype == TensorDtype::kF32 ? 4 : 1;
  }
  std::size_t expected_payload_size() const noexcept {
    return static_cast<std::size_t>(height) * width * channels * element_size(dtype);
  }

  /// Converts planar level indices to HWC payload; f32 stores the entropy
  /// value of each level.
  static FeatureTensor from_lep(const LepMap& map, TensorDtype dtype);
  /// Only for level-u8 tensors (kUnknownDtype otherwise).
  LepMap to_lep(int stride = 1) const;

  friend bool operator==(const FeatureTensor&, const FeatureTensor&) = default;
};

void write_tensor(const FeatureTensor& t, std::ostream& sink);
/// Reads exactly one tensor. kBadMagic / kUnknownVersion / kUnknownDtype /
/// kBadHeader / kTruncated on malformed input; never returns a partial tensor.
FeatureTensor read_tensor(std::istream& source);

std::vector<std::uint8_t> encode_tensor(const FeatureTensor& t);
/// Like read_tensor, and additionally rejects trailing bytes (kBadHeader).
FeatureTensor decode_tensor(std::span<const std::uint8_t> bytes);

}  // namespace mlep
