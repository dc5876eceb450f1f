#include "mlep/lep.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "mlep/error.hpp"

namespace mlep {

namespace {

constexpr std::array<std::uint8_t, 64> build_signature_table() {
  constexpr int kPairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  std::array<std::uint8_t, 64> table{};
  for (unsigned sig = 0; sig < 64; ++sig) {
    // Union the positions the signature declares equal.
    int parent[4] = {0, 1, 2, 3};
    auto find = [&parent](int x) {
      while (parent[x] != x) x = parent[x];
      return x;
    };
    for (int p = 0; p < 6; ++p) {
      if (sig >> p & 1u) {
        const int ra = find(kPairs[p][0]);
        const int rb = find(kPairs[p][1]);
        if (ra != rb) parent[ra] = rb;
      }
    }
    bool consistent = true;
    for (int p = 0; p < 6; ++p) {
      const bool same = find(kPairs[p][0]) == find(kPairs[p][1]);
      consistent = consistent && same == ((sig >> p & 1u) != 0);
    }
    if (!consistent) {
      table[sig] = kUnreachableSignature;
      continue;
    }
    int sizes[4] = {0, 0, 0, 0};
    for (int i = 0; i < 4; ++i) ++sizes[find(i)];
    int largest = 0;
    int groups = 0;
    for (int s : sizes) {
      largest = std::max(largest, s);
      groups += s > 0;
    }
    // {4} {3,1} {2,2} {2,1,1} {1,1,1,1}
    std::uint8_t level = 0;
    if (groups == 1) level = 0;
    else if (groups == 2) level = largest == 3 ? 1 : 2;
    else if (groups == 3) level = 3;
    else level = 4;
    table[sig] = level;
  }
  return table;
}

constexpr std::array<std::uint8_t, 64> kSignatureTable = build_signature_table();

void check_stack(const ScaledStack& stack, int stride) {
  if (stride != 1 && stride != 2) {
    throw Error(ErrorCode::kConfig, "stride must be 1 or 2, got " + std::to_string(stride));
  }
  if (stack.height < 2 || stack.width < 2) {
    throw Error(ErrorCode::kDimension, "LEP requires at least a 2x2 stack");
  }
  if (stack.data.size() != stack.plane_size() * stack.channels) {
    throw Error(ErrorCode::kDimension, "stack buffer size mismatch");
  }
}

LepMap empty_map(const ScaledStack& stack, int stride) {
  LepMap map;
  map.height = lep_extent(stack.height, stride);
  map.width = lep_extent(stack.width, stride);
  map.channels = stack.channels;
  map.stride = stride;
  map.data.assign(map.plane_size() * map.channels, 0);
  return map;
}

void lep_fast_channel(const ScaledStack& stack, int stride, int c, LepMap& map) {
  const auto src = stack.plane(c);
  const int w = stack.width;
  std::uint8_t* out = map.data.data() + c * map.plane_size();
  for (int i = 0; i < map.height; ++i) {
    const std::uint8_t* r0 = src.data() + static_cast<std::size_t>(i) * stride * w;
    const std::uint8_t* r1 = r0 + w;
    std::uint8_t* o = out + static_cast<std::size_t>(i) * map.width;
    if (stride == 1) {
      for (int j = 0; j < map.width; ++j) {
        o[j] = kSignatureTable[equality_signature(r0[j], r0[j + 1], r1[j], r1[j + 1])];
      }
    } else {
      for (int j = 0; j < map.width; ++j) {
        const int x = 2 * j;
        o[j] = kSignatureTable[equality_signature(r0[x], r0[x + 1], r1[x], r1[x + 1])];
      }
    }
  }
}

}  // namespace

const std::array<std::uint8_t, 64>& signature_table() noexcept { return kSignatureTable; }

double window_entropy_bits(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d) {
  const std::uint8_t px[4] = {a, b, c, d};
  double h = 0.0;
  for (int i = 0; i < 4; ++i) {
    bool first = true;
    for (int j = 0; j < i; ++j) first = first && px[j] != px[i];
    if (!first) continue;
    int count = 0;
    for (int j = 0; j < 4; ++j) count += px[j] == px[i];
    const double p = count / 4.0;
    h -= p * std::log2(p);
  }
  return h;
}

EntropyLevel window_entropy(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d) {
  const double h = window_entropy_bits(a, b, c, d);
  std::uint8_t best = 0;
  for (std::uint8_t k = 1; k < kLevelCount; ++k) {
    if (std::abs(kLevelValues[k] - h) < std::abs(kLevelValues[best] - h)) best = k;
  }
  return EntropyLevel{best};
}

LepMap lep_naive(const ScaledStack& stack, int stride) {
  check_stack(stack, stride);
  LepMap map = empty_map(stack, stride);
  for (int c = 0; c < stack.channels; ++c) {
    const auto src = stack.plane(c);
    auto px = [&](int y, int x) { return src[static_cast<std::size_t>(y) * stack.width + x]; };
    for (int i = 0; i < map.height; ++i) {
      for (int j = 0; j < map.width; ++j) {
        const int y = i * stride;
        const int x = j * stride;
        map.data[c * map.plane_size() + static_cast<std::size_t>(i) * map.width + j] =
            window_entropy(px(y, x), px(y, x + 1), px(y + 1, x), px(y + 1, x + 1)).index;
      }
    }
  }
  return map;
}

LepMap lep_fast(const ScaledStack& stack, int stride, int threads) {
  check_stack(stack, stride);
  LepMap map = empty_map(stack, stride);
  const int workers = std::clamp(threads, 1, std::max(1, stack.channels));
  if (workers == 1) {
    for (int c = 0; c < stack.channels; ++c) lep_fast_channel(stack, stride, c, map);
    return map;
  }
  // Channels write disjoint planes, so no synchronisation beyond join.
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&, t] {
      for (int c = t; c < stack.channels; c += workers) lep_fast_channel(stack, stride, c, map);
    });
  }
  for (auto& th : pool) th.join();
  return map;
}

std::array<std::uint64_t, kLevelCount> level_counts(const LepMap& map, int channel) {
  std::array<std::uint64_t, kLevelCount> counts{};
  for (std::uint8_t v : map.plane(channel)) ++counts[v];
  return counts;
}

std::vector<RasterImage> lep_to_u8(const LepMap& map) {
  std::vector<RasterImage> out;
  out.reserve(map.channels);
  for (int c = 0; c < map.channels; ++c) {
    RasterImage img(map.height, map.width, 1);
    const auto src = map.plane(c);
    std::transform(src.begin(), src.end(), img.data().begin(),
                   [](std::uint8_t level) { return kLevelGrey[level]; });
    out.push_back(std::move(img));
  }
  return out;
}

}  // namespace mlep
