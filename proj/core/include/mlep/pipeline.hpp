#pragma once

#include <cstdint>
#include <string>

#include "mlep/lep.hpp"
#include "mlep/pyramid.hpp"
#include "mlep/raster.hpp"
#include "mlep/shuffle.hpp"

namespace mlep {

/// Extraction settings. Defaults are the best-performing published setting:
/// 2x2 patches, scales {1, 1/2, 1/4}, bilinear resampling, stride 1, 224 input.
struct MlepConfig {
  int patch_size = 2;
  ScaleSet scales{{ScaleFactor(1, 1), ScaleFactor(1, 2), ScaleFactor(1, 4)}};
  InterpKernel interp = InterpKernel::kBilinear;
  int stride = 1;
  std::uint64_t seed = 0;
  /// Shorter side is resized to this, then an input_size x input_size crop
  /// is taken. 0 keeps the image at its native size.
  int input_size = 224;
  CropMode crop = CenterCrop{};

  /// Patch size in {2, 4, 8}, stride in {1, 2}, input_size 0 or >= 2,
  /// scale set well formed. Throws kConfig.
  void validate() const;

  std::string to_json() const;
  static MlepConfig from_json(const std::string& text);

  friend bool operator==(const MlepConfig&, const MlepConfig&) = default;
};

/// Resize (shorter side to input_size, aspect kept, bilinear) then crop to
/// input_size x input_size with cfg.crop. No-op when input_size == 0.
RasterImage prepare_input(const RasterImage& img, const MlepConfig& cfg);

/// Everything before the entropy stage: prepare_input, centre crop to a
/// multiple of the patch size, per-channel patch shuffle with cfg.seed, and
/// the multi-scale stack.
ScaledStack mlep_stack(const RasterImage& img, const MlepConfig& cfg);

/// mlep_stack followed by lep_fast. Errors carry the failing stage name.
/// Deterministic for fixed (img, cfg) regardless of `threads`.
LepMap extract_mlep(const RasterImage& img, const MlepConfig& cfg, int threads = 1);

}  // namespace mlep
