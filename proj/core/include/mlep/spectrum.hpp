#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "mlep/pipeline.hpp"
#include "mlep/raster.hpp"

namespace mlep {

/// Row-major complex grid. When the source dims were not powers of two the
/// transform ran on a zero-padded grid; source_* record the original dims.
struct ComplexGrid {
  int height = 0;
  int width = 0;
  int source_height = 0;
  int source_width = 0;
  std::vector<std::complex<double>> data;

  bool padded() const noexcept { return height != source_height || width != source_width; }
  std::complex<double> at(int y, int x) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

/// In-place radix-2 FFT; size must be a power of two. Forward is
/// unnormalised; inverse divides by n.
void fft_inplace(std::span<std::complex<double>> values, bool inverse);

/// Forward 2-D DFT (row-column), zero-padding each axis to the next power of two.
ComplexGrid dft2(std::span<const double> grid, int height, int width);

/// Inverse of dft2 over the padded grid (scaled by 1/(H*W)).
ComplexGrid idft2(const ComplexGrid& spectrum);

struct DiffStats {
  double pixel = 0.0;     // mean |real - fake| in intensity levels
  double entropy = 0.0;   // mean |LEP_u8(real) - LEP_u8(fake)| over all C*K planes
  double spectrum = 0.0;  // mean |log(1+|X_real|) - log(1+|X_fake|)|
};

struct DiffReport {
  RasterImage pixel_diff;     // H x W x C
  RasterImage entropy_diff;   // LEP dims x C, max over scales per colour channel
  RasterImage spectrum_diff;  // padded H x W x C, DC centred, scaled to [0, 255]
  DiffStats stats;

  std::string stats_json() const;
};

/// Pixel, entropy and Fourier-domain differences between two images of equal
/// shape. Both go through prepare_input(cfg); the entropy domain uses the
/// configured scales/kernel/stride with shuffling disabled.
DiffReport diff_report(const RasterImage& real, const RasterImage& fake, const MlepConfig& cfg);

}  // namespace mlep
