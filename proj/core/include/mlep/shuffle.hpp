#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mlep/raster.hpp"

namespace mlep {

/// Patch grid for an H x W image and patch size l. When l does not divide
/// the image, the grid covers the largest centred sub-image that it does,
/// and `crop_top`/`crop_left` give where that sub-image starts.
struct PatchGrid {
  int rows = 0;
  int cols = 0;
  int crop_top = 0;
  int crop_left = 0;
  int crop_height = 0;
  int crop_width = 0;

  bool needs_crop(int h, int w) const noexcept { return crop_height != h || crop_width != w; }
  friend bool operator==(const PatchGrid&, const PatchGrid&) = default;
};

/// Throws kDimension when h < l or w < l (or l < 1).
PatchGrid partition_grid(int h, int w, int patch_size);

/// Per-channel patch permutations. `permutations[c][k]` is the destination
/// grid index of source patch k (row-major over the grid), i.e. the shuffled
/// image has source patch k at position permutations[c][k].
struct ShuffleSpec {
  int patch_size = 1;
  std::uint64_t seed = 0;
  bool per_channel = true;
  int grid_rows = 0;
  int grid_cols = 0;
  std::vector<std::vector<std::uint32_t>> permutations;

  /// Identity permutations for the given image geometry.
  static ShuffleSpec identity(int height, int width, int channels, int patch_size);

  /// Throws kConfig if any permutation is not a bijection over the grid.
  void validate() const;

  std::string to_json() const;
  static ShuffleSpec from_json(const std::string& text);

  friend bool operator==(const ShuffleSpec&, const ShuffleSpec&) = default;
};

/// Permutation for one channel, drawn by Fisher-Yates from the stream keyed
/// by derive_seed(seed, channel).
std::vector<std::uint32_t> channel_permutation(std::uint64_t seed, int channel,
                                               std::size_t patch_count);

struct ShuffleResult {
  RasterImage image;
  ShuffleSpec spec;
};

/// Each channel's l x l patches are moved by an independent uniform
/// permutation. H and W must be divisible by l (kDimension otherwise).
ShuffleResult shuffle_image(const RasterImage& img, int patch_size, std::uint64_t seed);

/// Applies an existing spec (shuffle direction).
RasterImage apply_shuffle(const RasterImage& img, const ShuffleSpec& spec);

/// Inverse of apply_shuffle for the same spec.
RasterImage unshuffle_image(const RasterImage& img, const ShuffleSpec& spec);

}  // namespace mlep
