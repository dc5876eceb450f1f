#include "mlep/pyramid.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numeric>
#include <tuple>
#include <utility>

#include "mlep/error.hpp"

namespace mlep {

namespace {

__extension__ using int128_t = __int128;
__extension__ using uint128_t = unsigned __int128;

// Per destination index: source taps and integer weights that sum to `scale`.
struct AxisTaps {
  int count = 0;
  std::int64_t scale = 1;
  std::vector<int> index;             // dst_len * count
  std::vector<std::int64_t> weight;   // dst_len * count
};

// ratio = ratio_num / ratio_den source pixels per destination pixel. The
// source coordinate of d is ((2d + 1) * ratio_num - ratio_den) / (2 * ratio_den).
AxisTaps make_taps(int src_len, int dst_len, std::int64_t ratio_num, std::int64_t ratio_den,
                   InterpKernel k) {
  AxisTaps taps;
  taps.count = k == InterpKernel::kNearest ? 1 : k == InterpKernel::kBilinear ? 2 : 4;
  const std::int64_t q = 2 * ratio_den;
  taps.scale = k == InterpKernel::kNearest ? 1 : k == InterpKernel::kBilinear ? q : 2 * q * q * q;
  taps.index.resize(static_cast<std::size_t>(dst_len) * taps.count);
  taps.weight.resize(taps.index.size());
  const std::int64_t max_p = static_cast<std::int64_t>(src_len - 1) * q;
  for (int d = 0; d < dst_len; ++d) {
    const std::int64_t p =
        std::clamp((2 * static_cast<std::int64_t>(d) + 1) * ratio_num - ratio_den, std::int64_t{0}, max_p);
    const auto i0 = static_cast<int>(p / q);
    const std::int64_t f = p - i0 * q;  // fractional part, in units of 1/q
    int* idx = &taps.index[static_cast<std::size_t>(d) * taps.count];
    std::int64_t* w = &taps.weight[static_cast<std::size_t>(d) * taps.count];
    switch (k) {
      case InterpKernel::kNearest:
        idx[0] = std::min(static_cast<int>((2 * p + q) / (2 * q)), src_len - 1);
        w[0] = 1;
        break;
      case InterpKernel::kBilinear:
        idx[0] = i0;
        idx[1] = std::min(i0 + 1, src_len - 1);
        w[0] = q - f;
        w[1] = f;
        break;
      case InterpKernel::kBicubic: {
        // Catmull-Rom (a = -1/2) weights at t = f/q, multiplied by 2q^3.
        const std::int64_t f2 = f * f, f3 = f2 * f, q2 = q * q, q3 = q2 * q;
        const std::int64_t cw[4] = {-f3 + 2 * f2 * q - f * q2, 3 * f3 - 5 * f2 * q + 2 * q3,
                                    -3 * f3 + 4 * f2 * q + f * q2, f3 - f2 * q};
        for (int j = 0; j < 4; ++j) {
          idx[j] = std::clamp(i0 - 1 + j, 0, src_len - 1);
          w[j] = cw[j];
        }
        break;
      }
    }
  }
  return taps;
}

// Exact num/den rounded half away from zero, clamped to u8.
std::uint8_t quantize(int128_t num, int128_t den) {
  if (num <= 0) return 0;
  const int128_t r = (2 * num + den) / (2 * den);
  return static_cast<std::uint8_t>(r > 255 ? 255 : r);
}

RasterImage resample_with_ratio(const RasterImage& img, int dst_h, int dst_w, std::int64_t ry_num,
                                std::int64_t ry_den, std::int64_t rx_num, std::int64_t rx_den,
                                InterpKernel k) {
  const int src_h = img.height();
  const int src_w = img.width();
  for (int side : {src_h, src_w, dst_h, dst_w}) {
    if (side > kMaxResampleSide) {
      throw Error(ErrorCode::kDimension,
                  "resampling supports sides up to " + std::to_string(kMaxResampleSide));
    }
  }
  RasterImage out(dst_h, dst_w, img.channels());
  const AxisTaps tx = make_taps(src_w, dst_w, rx_num, rx_den, k);
  const AxisTaps ty = make_taps(src_h, dst_h, ry_num, ry_den, k);
  const int128_t den = static_cast<int128_t>(tx.scale) * ty.scale;

  // Horizontal sums fit in 64 bits: |weights| sum to < 1.25 * scale <= 2^55.
  std::vector<std::int64_t> rows(static_cast<std::size_t>(src_h) * dst_w);
  for (int c = 0; c < img.channels(); ++c) {
    const auto src = img.plane(c);
    for (int y = 0; y < src_h; ++y) {
      const std::uint8_t* srow = src.data() + static_cast<std::size_t>(y) * src_w;
      std::int64_t* hrow = rows.data() + static_cast<std::size_t>(y) * dst_w;
      for (int x = 0; x < dst_w; ++x) {
        const int* idx = &tx.index[static_cast<std::size_t>(x) * tx.count];
        const std::int64_t* w = &tx.weight[static_cast<std::size_t>(x) * tx.count];
        std::int64_t acc = 0;
        for (int j = 0; j < tx.count; ++j) acc += w[j] * srow[idx[j]];
        hrow[x] = acc;
      }
    }
    auto dst = out.plane(c);
    for (int y = 0; y < dst_h; ++y) {
      const int* idx = &ty.index[static_cast<std::size_t>(y) * ty.count];
      const std::int64_t* w = &ty.weight[static_cast<std::size_t>(y) * ty.count];
      std::uint8_t* drow = dst.data() + static_cast<std::size_t>(y) * dst_w;
      for (int x = 0; x < dst_w; ++x) {
        int128_t acc = 0;
        for (int i = 0; i < ty.count; ++i) {
          acc += static_cast<int128_t>(w[i]) * rows[static_cast<std::size_t>(idx[i]) * dst_w + x];
        }
        drow[x] = quantize(acc, den);
      }
    }
  }
  return out;
}

// Closest fraction to num/den with denominator <= max_den (continued
// fraction convergents and the best semiconvergent).
std::pair<std::uint64_t, std::uint64_t> limit_denominator(std::uint64_t num, std::uint64_t den,
                                                          std::uint64_t max_den) {
  std::uint64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  std::uint64_t n = num, d = den;
  while (d != 0) {
    const std::uint64_t a = n / d;
    const std::uint64_t q2 = q0 + a * q1;
    if (q2 > max_den) break;
    const std::uint64_t p2 = p0 + a * p1;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const std::uint64_t r = n - a * d;
    n = d;
    d = r;
  }
  if (d == 0) return {p1, q1};
  const std::uint64_t k = (max_den - q0) / q1;
  const std::uint64_t bp = p0 + k * p1, bq = q0 + k * q1;
  // Pick whichever of p1/q1 and bp/bq is nearer to num/den.
  const auto dist = [&](std::uint64_t p, std::uint64_t q) {
    const auto a = static_cast<uint128_t>(p) * den;
    const auto b = static_cast<uint128_t>(num) * q;
    const auto diff = a > b ? a - b : b - a;
    return std::pair{diff, q};
  };
  const auto [d1, s1] = dist(p1, q1);
  const auto [d2, s2] = dist(bp, bq);
  // d1/s1 vs d2/s2, cross-multiplied (both products stay below 2^100).
  return d2 * s1 < d1 * s2 ? std::pair{bp, bq} : std::pair{p1, q1};
}

}  // namespace

std::string_view to_string(InterpKernel k) {
  switch (k) {
    case InterpKernel::kNearest: return "nearest";
    case InterpKernel::kBilinear: return "bilinear";
    case InterpKernel::kBicubic: return "bicubic";
  }
  return "?";
}

InterpKernel parse_interp(std::string_view name) {
  if (name == "nearest") return InterpKernel::kNearest;
  if (name == "bilinear") return InterpKernel::kBilinear;
  if (name == "bicubic") return InterpKernel::kBicubic;
  throw Error(ErrorCode::kConfig, "unknown interpolation kernel '" + std::string(name) + "'");
}

ScaleFactor::ScaleFactor(std::uint32_t num, std::uint32_t den) {
  if (den == 0 || num == 0 || num > den) {
    throw Error(ErrorCode::kConfig, "scale factor " + std::to_string(num) + "/" +
                                        std::to_string(den) + " is outside (0, 1]");
  }
  const std::uint32_t g = std::gcd(num, den);
  num_ = num / g;
  den_ = den / g;
  if (den_ > kMaxDenominator) {
    throw Error(ErrorCode::kConfig, "scale factor " + to_string() + " has a denominator above " +
                                        std::to_string(kMaxDenominator));
  }
}

ScaleFactor ScaleFactor::parse(std::string_view text) {
  auto fail = [&]() -> ScaleFactor {
    throw Error(ErrorCode::kConfig, "cannot parse scale factor '" + std::string(text) + "'");
  };
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) return fail();

  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    std::uint32_t num = 0, den = 0;
    const auto a = text.substr(0, slash);
    const auto b = text.substr(slash + 1);
    if (std::from_chars(a.data(), a.data() + a.size(), num).ptr != a.data() + a.size() ||
        std::from_chars(b.data(), b.data() + b.size(), den).ptr != b.data() + b.size() ||
        a.empty() || b.empty()) {
      return fail();
    }
    return ScaleFactor(num, den);
  }

  std::uint64_t num = 0;
  std::uint64_t den = 1;
  bool seen_dot = false;
  bool seen_digit = false;
  int digits = 0;
  for (char ch : text) {
    if (ch == '.') {
      if (seen_dot) return fail();
      seen_dot = true;
    } else if (ch >= '0' && ch <= '9') {
      seen_digit = true;
      if (num == 0 && ch == '0' && !seen_dot) continue;
      // Digits past 18 significant places cannot change the closest
      // fraction with a 16-bit denominator.
      if (++digits > 18) continue;
      num = num * 10 + static_cast<std::uint64_t>(ch - '0');
      if (seen_dot) den *= 10;
    } else {
      return fail();
    }
  }
  if (!seen_digit || num == 0 || num > den) return fail();
  const std::uint64_t g = std::gcd(num, den);
  num /= g;
  den /= g;
  if (den > kMaxDenominator) std::tie(num, den) = limit_denominator(num, den, kMaxDenominator);
  if (num == 0) return fail();
  return ScaleFactor(static_cast<std::uint32_t>(num), static_cast<std::uint32_t>(den));
}

ScaleFactor ScaleFactor::from_double(double value) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                 std::chars_format::fixed);
  if (res.ec != std::errc()) {
    throw Error(ErrorCode::kConfig, "scale factor not representable");
  }
  return parse(std::string_view(buf.data(), res.ptr));
}

int ScaleFactor::apply(int n) const noexcept {
  return static_cast<int>(static_cast<std::uint64_t>(n) * num_ / den_);
}

std::string ScaleFactor::to_string() const {
  if (num_ == den_) return "1";
  return std::to_string(num_) + "/" + std::to_string(den_);
}

void ScaleSet::validate(int height, int width) const {
  if (factors.empty()) throw Error(ErrorCode::kConfig, "scale set is empty");
  if (!factors.front().is_identity()) {
    throw Error(ErrorCode::kConfig, "first scale factor must be 1");
  }
  for (const auto& s : factors) {
    if (s.apply(height) < 2 || s.apply(width) < 2) {
      throw Error(ErrorCode::kConfig,
                  "scale " + s.to_string() + " shrinks " + std::to_string(height) + "x" +
                      std::to_string(width) + " below 2x2");
    }
  }
}

ScaleSet ScaleSet::parse(std::string_view csv) {
  ScaleSet set;
  while (true) {
    const auto comma = csv.find(',');
    set.factors.push_back(ScaleFactor::parse(csv.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    csv.remove_prefix(comma + 1);
  }
  return set;
}

std::string ScaleSet::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (i) out += ',';
    out += factors[i].to_string();
  }
  return out;
}

ScaledStack ScaledStack::from_image(const RasterImage& img) {
  ScaledStack st(img.height(), img.width(), img.channels());
  std::copy(img.data().begin(), img.data().end(), st.data.begin());
  return st;
}

RasterImage downsample(const RasterImage& img, ScaleFactor s, InterpKernel k) {
  const int h = s.apply(img.height());
  const int w = s.apply(img.width());
  if (h < 2 || w < 2) {
    throw Error(ErrorCode::kConfig, "downsample by " + s.to_string() +
                                        " yields fewer than 2x2 pixels");
  }
  if (s.is_identity()) return img;
  return resample_with_ratio(img, h, w, s.den(), s.num(), s.den(), s.num(), k);
}

RasterImage upsample(const RasterImage& img, int h, int w, InterpKernel k) {
  if (h < img.height() || w < img.width()) {
    throw Error(ErrorCode::kDimension, "upsample target " + std::to_string(h) + "x" +
                                           std::to_string(w) + " is smaller than source");
  }
  return resample(img, h, w, k);
}

RasterImage resample(const RasterImage& img, int h, int w, InterpKernel k) {
  if (h == img.height() && w == img.width()) return img;
  return resample_with_ratio(img, h, w, img.height(), h, img.width(), w, k);
}

ScaledStack build_stack(const RasterImage& img, const ScaleSet& scales, InterpKernel k) {
  scales.validate(img.height(), img.width());
  const int c = img.channels();
  ScaledStack stack(img.height(), img.width(), c * static_cast<int>(scales.factors.size()));
  for (std::size_t si = 0; si < scales.factors.size(); ++si) {
    const ScaleFactor s = scales.factors[si];
    const RasterImage block =
        s.is_identity() ? img : upsample(downsample(img, s, k), img.height(), img.width(), k);
    std::copy(block.data().begin(), block.data().end(),
              stack.data.begin() + static_cast<std::ptrdiff_t>(si * c * stack.plane_size()));
  }
  return stack;
}

}  // namespace mlep
