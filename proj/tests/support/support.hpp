#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mlep/lep.hpp"
#include "mlep/pyramid.hpp"
#include "mlep/raster.hpp"

namespace mlep::testing {

// ---- oracles ----------------------------------------------------------------

/// Exact probabilities of each level for a 2x2 window of iid values drawn
/// uniformly from an alphabet of `n` symbols, from multiset partition counts.
std::array<double, kLevelCount> level_probabilities(std::uint64_t n);

/// Same quantity by enumerating all n^4 windows (n <= 16 is practical).
std::array<std::uint64_t, kLevelCount> level_counts_bruteforce(int n);

/// Bilinear resample of one plane using exact rational arithmetic on the
/// half-pixel convention, rounded half away from zero.
std::vector<std::uint8_t> bilinear_oracle(std::span<const std::uint8_t> src, int h, int w,
                                          int out_h, int out_w, std::int64_t ratio_num_y,
                                          std::int64_t ratio_den_y, std::int64_t ratio_num_x,
                                          std::int64_t ratio_den_x);

/// O(N^2) 2-D DFT with no padding.
std::vector<std::complex<double>> direct_dft2(std::span<const double> grid, int h, int w);

/// Average precision from a sweep over distinct score thresholds.
double average_precision_sweep(std::span<const double> scores, std::span<const int> labels);

// ---- synthetic data ---------------------------------------------------------

/// Smooth procedural texture plus small iid noise, around mid grey.
RasterImage synthetic_real(std::uint64_t seed, int size = 224, int channels = 3);

/// Bilinear down-up at 1/2 followed by a [1 2 1]/4 separable blur.
RasterImage synthetic_fake(const RasterImage& real);

/// iid uniform u8 image.
RasterImage noise_image(std::uint64_t seed, int h, int w, int channels);

/// Stack of iid values in [0, alphabet).
ScaledStack random_stack(std::uint64_t seed, int h, int w, int channels, int alphabet);

/// Writes `n_per_class` real/fake pairs as PNGs and a manifest with
/// `n_train` per class in the train split. Returns the manifest path.
std::filesystem::path write_synthetic_corpus(const std::filesystem::path& dir, int n_per_class,
                                             int n_train, int size = 224,
                                             std::uint64_t seed = 7);

// ---- filesystem -------------------------------------------------------------

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "mlep");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::filesystem::path fixture_dir();

}  // namespace mlep::testing
