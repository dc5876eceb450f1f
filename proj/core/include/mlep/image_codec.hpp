#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "mlep/raster.hpp"

namespace mlep {

/// Decodes a PNG or JPEG payload (format sniffed from the signature).
/// Greyscale sources give 1 channel, colour sources 3; alpha is discarded
/// without compositing. Errors are kDecode with the failing stage in the
/// message ("png header", "jpeg scanlines", ...).
RasterImage decode_image(std::span<const std::uint8_t> bytes);

/// Lossless 8-bit PNG (grey or RGB).
std::vector<std::uint8_t> encode_png(const RasterImage& img);

RasterImage read_image(const std::filesystem::path& path);

}  // namespace mlep
