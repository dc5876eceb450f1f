#include "mlep/spectrum.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "json.hpp"
#include "mlep/error.hpp"
#include "mlep/lep.hpp"
#include "mlep/pyramid.hpp"

namespace mlep {

namespace {

int next_pow2(int n) { return static_cast<int>(std::bit_ceil(static_cast<unsigned>(n))); }

RasterImage abs_diff(const RasterImage& a, const RasterImage& b) {
  RasterImage out(a.height(), a.width(), a.channels());
  auto da = a.data();
  auto db = b.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = static_cast<std::uint8_t>(std::abs(int{da[i]} - int{db[i]}));
  }
  return out;
}

std::vector<double> log_magnitude(const ComplexGrid& g) {
  std::vector<double> out(g.data.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::log1p(std::abs(g.data[i]));
  return out;
}

}  // namespace

void fft_inplace(std::span<std::complex<double>> values, bool inverse) {
  const std::size_t n = values.size();
  if (n == 0 || !std::has_single_bit(n)) {
    throw Error(ErrorCode::kDimension, "FFT length must be a power of two");
  }
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(values[i], values[j]);
  }
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    for (std::size_t k = 0; k < half; ++k) {
      // Twiddles are evaluated directly rather than by recurrence to keep
      // the error flat across long transforms.
      const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(len);
      const std::complex<double> w(std::cos(angle), std::sin(angle));
      for (std::size_t i = k; i < n; i += len) {
        const auto u = values[i];
        const auto v = values[i + half] * w;
        values[i] = u + v;
        values[i + half] = u - v;
      }
    }
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& v : values) v *= scale;
  }
}

namespace {

void transform_2d(ComplexGrid& g, bool inverse) {
  std::vector<std::complex<double>> column(g.height);
  for (int y = 0; y < g.height; ++y) {
    fft_inplace(std::span(g.data).subspan(static_cast<std::size_t>(y) * g.width, g.width), inverse);
  }
  for (int x = 0; x < g.width; ++x) {
    for (int y = 0; y < g.height; ++y) column[y] = g.data[static_cast<std::size_t>(y) * g.width + x];
    fft_inplace(column, inverse);
    for (int y = 0; y < g.height; ++y) g.data[static_cast<std::size_t>(y) * g.width + x] = column[y];
  }
}

}  // namespace

ComplexGrid dft2(std::span<const double> grid, int height, int width) {
  if (height < 2 || width < 2 || grid.size() != static_cast<std::size_t>(height) * width) {
    throw Error(ErrorCode::kDimension, "dft2 needs an H x W grid with H, W >= 2");
  }
  ComplexGrid g;
  g.source_height = height;
  g.source_width = width;
  g.height = next_pow2(height);
  g.width = next_pow2(width);
  g.data.assign(static_cast<std::size_t>(g.height) * g.width, {0.0, 0.0});
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      g.data[static_cast<std::size_t>(y) * g.width + x] = grid[static_cast<std::size_t>(y) * width + x];
    }
  }
  transform_2d(g, false);
  return g;
}

ComplexGrid idft2(const ComplexGrid& spectrum) {
  ComplexGrid g = spectrum;
  transform_2d(g, true);
  return g;
}

std::string DiffReport::stats_json() const {
  nlohmann::json j;
  j["pixel_mean_abs_diff"] = stats.pixel;
  j["entropy_mean_abs_diff"] = stats.entropy;
  j["spectrum_mean_abs_diff"] = stats.spectrum;
  j["pixel_dims"] = {pixel_diff.height(), pixel_diff.width(), pixel_diff.channels()};
  j["entropy_dims"] = {entropy_diff.height(), entropy_diff.width(), entropy_diff.channels()};
  j["spectrum_dims"] = {spectrum_diff.height(), spectrum_diff.width(), spectrum_diff.channels()};
  return j.dump(2);
}

DiffReport diff_report(const RasterImage& real_in, const RasterImage& fake_in,
                       const MlepConfig& cfg) {
  if (real_in.height() != fake_in.height() || real_in.width() != fake_in.width() ||
      real_in.channels() != fake_in.channels()) {
    throw Error(ErrorCode::kDimension, "real and fake images differ in shape");
  }
  cfg.validate();
  const RasterImage real = prepare_input(real_in, cfg);
  const RasterImage fake = prepare_input(fake_in, cfg);
  const int channels = real.channels();

  // Pixel domain.
  RasterImage pixel = abs_diff(real, fake);
  double pixel_sum = 0.0;
  for (std::uint8_t v : pixel.data()) pixel_sum += v;

  // Entropy domain, unshuffled.
  const LepMap lr = lep_fast(build_stack(real, cfg.scales, cfg.interp), cfg.stride);
  const LepMap lf = lep_fast(build_stack(fake, cfg.scales, cfg.interp), cfg.stride);
  RasterImage entropy(lr.height, lr.width, channels);
  double entropy_sum = 0.0;
  const std::size_t n = lr.plane_size();
  for (int p = 0; p < lr.channels; ++p) {
    auto dst = entropy.plane(p % channels);
    for (std::size_t i = 0; i < n; ++i) {
      const int d = std::abs(int{kLevelGrey[lr.data[p * n + i]]} - int{kLevelGrey[lf.data[p * n + i]]});
      entropy_sum += d;
      dst[i] = std::max<std::uint8_t>(dst[i], static_cast<std::uint8_t>(d));
    }
  }

  // Fourier domain: |log(1+|X_r|) - log(1+|X_f|)|, DC shifted to the centre.
  std::vector<std::vector<double>> spec_diff;
  double spectrum_sum = 0.0;
  double spectrum_max = 0.0;
  int sh = 0, sw = 0;
  for (int c = 0; c < channels; ++c) {
    std::vector<double> ar(real.plane(c).begin(), real.plane(c).end());
    std::vector<double> af(fake.plane(c).begin(), fake.plane(c).end());
    const ComplexGrid xr = dft2(ar, real.height(), real.width());
    const ComplexGrid xf = dft2(af, fake.height(), fake.width());
    sh = xr.height;
    sw = xr.width;
    const auto mr = log_magnitude(xr);
    const auto mf = log_magnitude(xf);
    std::vector<double> d(mr.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
      d[i] = std::abs(mr[i] - mf[i]);
      spectrum_sum += d[i];
      spectrum_max = std::max(spectrum_max, d[i]);
    }
    spec_diff.push_back(std::move(d));
  }
  RasterImage spectrum(sh, sw, channels);
  for (int c = 0; c < channels; ++c) {
    for (int y = 0; y < sh; ++y) {
      for (int x = 0; x < sw; ++x) {
        const double v = spec_diff[c][static_cast<std::size_t>(y) * sw + x];
        const int ty = (y + sh / 2) % sh;
        const int tx = (x + sw / 2) % sw;
        spectrum.at(c, ty, tx) =
            spectrum_max > 0.0 ? static_cast<std::uint8_t>(std::lround(v / spectrum_max * 255.0)) : 0;
      }
    }
  }

  DiffReport report{std::move(pixel), std::move(entropy), std::move(spectrum), {}};
  report.stats.pixel = pixel_sum / static_cast<double>(report.pixel_diff.data().size());
  report.stats.entropy = entropy_sum / static_cast<double>(lr.data.size());
  report.stats.spectrum =
      spectrum_sum / static_cast<double>(static_cast<std::size_t>(sh) * sw * channels);
  return report;
}

}  // namespace mlep
