#include "mlep/shuffle.hpp"

#include <algorithm>
#include <numeric>

#include "json.hpp"

#include "mlep/error.hpp"
#include "mlep/rng.hpp"

namespace mlep {

namespace {

void check_geometry(const RasterImage& img, const ShuffleSpec& spec) {
  const int l = spec.patch_size;
  if (l < 1 || img.height() % l != 0 || img.width() % l != 0 ||
      img.height() / l != spec.grid_rows || img.width() / l != spec.grid_cols) {
    throw Error(ErrorCode::kDimension,
                "shuffle spec grid " + std::to_string(spec.grid_rows) + "x" +
                    std::to_string(spec.grid_cols) + " (l=" + std::to_string(l) +
                    ") does not match image " + std::to_string(img.height()) + "x" +
                    std::to_string(img.width()));
  }
  if (static_cast<int>(spec.permutations.size()) != img.channels()) {
    throw Error(ErrorCode::kDimension, "shuffle spec has " +
                                           std::to_string(spec.permutations.size()) +
                                           " channel permutations, image has " +
                                           std::to_string(img.channels()));
  }
}

void copy_patch(std::span<const std::uint8_t> src, std::span<std::uint8_t> dst, int width,
                int l, int cols, std::uint32_t from, std::uint32_t to) {
  const int fy = static_cast<int>(from) / cols * l;
  const int fx = static_cast<int>(from) % cols * l;
  const int ty = static_cast<int>(to) / cols * l;
  const int tx = static_cast<int>(to) % cols * l;
  for (int r = 0; r < l; ++r) {
    const auto* s = src.data() + static_cast<std::size_t>(fy + r) * width + fx;
    auto* d = dst.data() + static_cast<std::size_t>(ty + r) * width + tx;
    std::copy(s, s + l, d);
  }
}

RasterImage permute(const RasterImage& img, const ShuffleSpec& spec, bool inverse) {
  check_geometry(img, spec);
  spec.validate();
  RasterImage out(img.height(), img.width(), img.channels());
  for (int c = 0; c < img.channels(); ++c) {
    const auto& perm = spec.permutations[c];
    for (std::uint32_t k = 0; k < perm.size(); ++k) {
      if (inverse) {
        copy_patch(img.plane(c), out.plane(c), img.width(), spec.patch_size, spec.grid_cols,
                   perm[k], k);
      } else {
        copy_patch(img.plane(c), out.plane(c), img.width(), spec.patch_size, spec.grid_cols,
                   k, perm[k]);
      }
    }
  }
  return out;
}

}  // namespace

PatchGrid partition_grid(int h, int w, int patch_size) {
  if (patch_size < 1) {
    throw Error(ErrorCode::kDimension, "patch size must be positive");
  }
  if (h < patch_size || w < patch_size) {
    throw Error(ErrorCode::kDimension,
                "image " + std::to_string(h) + "x" + std::to_string(w) +
                    " is smaller than patch size " + std::to_string(patch_size));
  }
  PatchGrid g;
  g.rows = h / patch_size;
  g.cols = w / patch_size;
  g.crop_height = g.rows * patch_size;
  g.crop_width = g.cols * patch_size;
  g.crop_top = (h - g.crop_height) / 2;
  g.crop_left = (w - g.crop_width) / 2;
  return g;
}

ShuffleSpec ShuffleSpec::identity(int height, int width, int channels, int patch_size) {
  const PatchGrid g = partition_grid(height, width, patch_size);
  ShuffleSpec spec;
  spec.patch_size = patch_size;
  spec.grid_rows = g.rows;
  spec.grid_cols = g.cols;
  std::vector<std::uint32_t> id(static_cast<std::size_t>(g.rows) * g.cols);
  std::iota(id.begin(), id.end(), 0u);
  spec.permutations.assign(channels, id);
  return spec;
}

void ShuffleSpec::validate() const {
  const auto n = static_cast<std::size_t>(grid_rows) * static_cast<std::size_t>(grid_cols);
  for (std::size_t c = 0; c < permutations.size(); ++c) {
    const auto& p = permutations[c];
    std::vector<bool> seen(n, false);
    bool ok = p.size() == n;
    for (std::size_t i = 0; ok && i < p.size(); ++i) {
      ok = p[i] < n && !seen[p[i]];
      if (ok) seen[p[i]] = true;
    }
    if (!ok) {
      throw Error(ErrorCode::kConfig,
                  "permutation for channel " + std::to_string(c) + " is not a bijection");
    }
  }
}

std::string ShuffleSpec::to_json() const {
  nlohmann::json j;
  j["rng"] = std::string(kRngName);
  j["patch_size"] = patch_size;
  j["seed"] = seed;
  j["per_channel"] = per_channel;
  j["grid"] = {grid_rows, grid_cols};
  j["permutations"] = permutations;
  return j.dump();
}

ShuffleSpec ShuffleSpec::from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.contains("rng") && j["rng"].get<std::string>() != kRngName) {
      throw Error(ErrorCode::kParse, "shuffle spec was drawn with rng '" +
                                         j["rng"].get<std::string>() + "', expected '" +
                                         std::string(kRngName) + "'");
    }
    ShuffleSpec spec;
    spec.patch_size = j.at("patch_size").get<int>();
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.per_channel = j.at("per_channel").get<bool>();
    spec.grid_rows = j.at("grid").at(0).get<int>();
    spec.grid_cols = j.at("grid").at(1).get<int>();
    spec.permutations = j.at("permutations").get<std::vector<std::vector<std::uint32_t>>>();
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("shuffle spec: ") + e.what());
  }
}

std::vector<std::uint32_t> channel_permutation(std::uint64_t seed, int channel,
                                               std::size_t patch_count) {
  std::vector<std::uint32_t> perm(patch_count);
  std::iota(perm.begin(), perm.end(), 0u);
  CounterRng rng(derive_seed(seed, static_cast<std::uint64_t>(channel)));
  shuffle_in_place(std::span<std::uint32_t>(perm), rng);
  return perm;
}

ShuffleResult shuffle_image(const RasterImage& img, int patch_size, std::uint64_t seed) {
  if (patch_size < 1 || img.height() % patch_size != 0 || img.width() % patch_size != 0) {
    throw Error(ErrorCode::kDimension,
                "image " + std::to_string(img.height()) + "x" + std::to_string(img.width()) +
                    " is not divisible by patch size " + std::to_string(patch_size));
  }
  ShuffleSpec spec;
  spec.patch_size = patch_size;
  spec.seed = seed;
  spec.grid_rows = img.height() / patch_size;
  spec.grid_cols = img.width() / patch_size;
  const auto n = static_cast<std::size_t>(spec.grid_rows) * spec.grid_cols;
  for (int c = 0; c < img.channels(); ++c) {
    spec.permutations.push_back(channel_permutation(seed, c, n));
  }
  RasterImage out = permute(img, spec, false);
  return {std::move(out), std::move(spec)};
}

RasterImage apply_shuffle(const RasterImage& img, const ShuffleSpec& spec) {
  return permute(img, spec, false);
}

RasterImage unshuffle_image(const RasterImage& img, const ShuffleSpec& spec) {
  return permute(img, spec, true);
}

}  // namespace mlep
