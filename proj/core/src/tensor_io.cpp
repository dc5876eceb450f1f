#include "mlep/tensor_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "mlep/error.hpp"

namespace mlep {

namespace {

constexpr char kMagic[4] = {'M', 'L', 'E', 'P'};
constexpr std::uint64_t kMaxElements = 1ULL << 36;

void put_u32(std::uint8_t* p, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

void append_f32_le(std::vector<std::uint8_t>& out, float f) {
  const auto bits = std::bit_cast<std::uint32_t>(f);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

}  // namespace

FeatureTensor FeatureTensor::from_lep(const LepMap& map, TensorDtype dtype) {
  FeatureTensor t;
  t.height = static_cast<std::uint32_t>(map.height);
  t.width = static_cast<std::uint32_t>(map.width);
  t.channels = static_cast<std::uint32_t>(map.channels);
  t.dtype = dtype;
  t.payload.reserve(t.expected_payload_size());
  const std::size_t n = map.plane_size();
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < map.channels; ++c) {
      const std::uint8_t level = map.data[c * n + i];
      if (dtype == TensorDtype::kLevelU8) {
        t.payload.push_back(level);
      } else {
        append_f32_le(t.payload, static_cast<float>(kLevelValues[level]));
      }
    }
  }
  return t;
}

LepMap FeatureTensor::to_lep(int stride) const {
  if (dtype != TensorDtype::kLevelU8) {
    throw Error(ErrorCode::kUnknownDtype, "only level-u8 tensors convert to LEP maps");
  }
  LepMap map;
  map.height = static_cast<int>(height);
  map.width = static_cast<int>(width);
  map.channels = static_cast<int>(channels);
  map.stride = stride;
  map.data.resize(payload.size());
  const std::size_t n = map.plane_size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::uint32_t c = 0; c < channels; ++c) {
      const std::uint8_t level = payload[i * channels + c];
      if (level >= kLevelCount) {
        throw Error(ErrorCode::kBadHeader, "level index out of range in tensor payload");
      }
      map.data[c * n + i] = level;
    }
  }
  return map;
}

std::vector<std::uint8_t> encode_tensor(const FeatureTensor& t) {
  if (t.payload.size() != t.expected_payload_size()) {
    throw Error(ErrorCode::kDimension, "tensor payload length does not match its dims");
  }
  std::vector<std::uint8_t> out(kTensorHeaderSize + t.payload.size());
  std::memcpy(out.data(), kMagic, 4);
  out[4] = kTensorVersion;
  out[5] = static_cast<std::uint8_t>(t.dtype);
  out[6] = 0;
  out[7] = 0;
  put_u32(out.data() + 8, t.height);
  put_u32(out.data() + 12, t.width);
  put_u32(out.data() + 16, t.channels);
  std::copy(t.payload.begin(), t.payload.end(), out.begin() + kTensorHeaderSize);
  return out;
}

void write_tensor(const FeatureTensor& t, std::ostream& sink) {
  const auto bytes = encode_tensor(t);
  sink.write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
  if (!sink) throw Error(ErrorCode::kIo, "tensor write failed");
}

FeatureTensor read_tensor(std::istream& source) {
  std::uint8_t header[kTensorHeaderSize];
  source.read(reinterpret_cast<char*>(header), kTensorHeaderSize);
  const auto got = static_cast<std::size_t>(source.gcount());
  if (got >= 4 && std::memcmp(header, kMagic, 4) != 0) {
    throw Error(ErrorCode::kBadMagic, "not an MLEP tensor (bad magic)");
  }
  if (got < kTensorHeaderSize) {
    if (got < 4 && std::memcmp(header, kMagic, got) != 0) {
      throw Error(ErrorCode::kBadMagic, "not an MLEP tensor (bad magic)");
    }
    throw Error(ErrorCode::kTruncated, "tensor header truncated at " + std::to_string(got) +
                                           " of " + std::to_string(kTensorHeaderSize) +
                                           " bytes");
  }
  if (header[4] != kTensorVersion) {
    throw Error(ErrorCode::kUnknownVersion,
                "unsupported tensor version " + std::to_string(header[4]));
  }
  if (header[5] > 1) {
    throw Error(ErrorCode::kUnknownDtype, "unknown tensor dtype " + std::to_string(header[5]));
  }
  if (header[6] != 0 || header[7] != 0) {
    throw Error(ErrorCode::kBadHeader, "reserved header bytes are not zero");
  }
  FeatureTensor t;
  t.dtype = static_cast<TensorDtype>(header[5]);
  t.height = get_u32(header + 8);
  t.width = get_u32(header + 12);
  t.channels = get_u32(header + 16);
  const std::uint64_t elements =
      static_cast<std::uint64_t>(t.height) * t.width * static_cast<std::uint64_t>(t.channels);
  if (elements > kMaxElements) {
    throw Error(ErrorCode::kBadHeader, "tensor dims implausibly large");
  }
  const std::size_t size = t.expected_payload_size();
  std::vector<std::uint8_t> payload(size);
  source.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(size));
  if (static_cast<std::size_t>(source.gcount()) != size) {
    throw Error(ErrorCode::kTruncated, "tensor payload truncated: " +
                                           std::to_string(source.gcount()) + " of " +
                                           std::to_string(size) + " bytes");
  }
  t.payload = std::move(payload);
  return t;
}

FeatureTensor decode_tensor(std::span<const std::uint8_t> bytes) {
  std::istringstream in(std::string(reinterpret_cast<const char*>(bytes.data()), bytes.size()),
                        std::ios::binary);
  FeatureTensor t = read_tensor(in);
  if (in.peek() != std::char_traits<char>::eof()) {
    throw Error(ErrorCode::kBadHeader, "trailing bytes after tensor payload");
  }
  return t;
}

}  // namespace mlep
