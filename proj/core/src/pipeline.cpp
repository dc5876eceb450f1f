#include "mlep/pipeline.hpp"

#include <cmath>

#include "json.hpp"
#include "mlep/error.hpp"

namespace mlep {

namespace {

template <typename Fn>
auto run_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw e.with_stage(stage);
  }
}

}  // namespace

void MlepConfig::validate() const {
  if (patch_size != 2 && patch_size != 4 && patch_size != 8) {
    throw Error(ErrorCode::kConfig,
                "patch size " + std::to_string(patch_size) + " not supported (use 2, 4 or 8)");
  }
  if (stride != 1 && stride != 2) {
    throw Error(ErrorCode::kConfig, "stride must be 1 or 2");
  }
  if (input_size != 0 && input_size < 2) {
    throw Error(ErrorCode::kConfig, "input size must be 0 or at least 2");
  }
  if (input_size != 0) {
    scales.validate(input_size, input_size);
  } else if (scales.factors.empty() || !scales.factors.front().is_identity()) {
    throw Error(ErrorCode::kConfig, "scale set must start with 1");
  }
}

std::string MlepConfig::to_json() const {
  nlohmann::json j;
  j["patch_size"] = patch_size;
  auto& s = j["scales"] = nlohmann::json::array();
  for (const auto& f : scales.factors) s.push_back(f.to_string());
  j["interp"] = std::string(to_string(interp));
  j["stride"] = stride;
  j["seed"] = seed;
  j["input_size"] = input_size;
  if (const auto* r = std::get_if<RandomCrop>(&crop)) {
    j["crop"] = {{"mode", "random"}, {"seed", r->seed}};
  } else {
    j["crop"] = {{"mode", "center"}};
  }
  return j.dump(2);
}

MlepConfig MlepConfig::from_json(const std::string& text) {
  MlepConfig cfg;
  try {
    const auto j = nlohmann::json::parse(text);
    cfg.patch_size = j.at("patch_size").get<int>();
    cfg.scales.factors.clear();
    for (const auto& v : j.at("scales")) {
      cfg.scales.factors.push_back(v.is_string() ? ScaleFactor::parse(v.get<std::string>())
                                                 : ScaleFactor::from_double(v.get<double>()));
    }
    cfg.interp = parse_interp(j.at("interp").get<std::string>());
    cfg.stride = j.at("stride").get<int>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.input_size = j.at("input_size").get<int>();
    const auto& crop = j.at("crop");
    const auto mode = crop.at("mode").get<std::string>();
    if (mode == "random") {
      cfg.crop = RandomCrop{crop.at("seed").get<std::uint64_t>()};
    } else if (mode == "center") {
      cfg.crop = CenterCrop{};
    } else {
      throw Error(ErrorCode::kConfig, "unknown crop mode '" + mode + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

RasterImage prepare_input(const RasterImage& img, const MlepConfig& cfg) {
  const int target = cfg.input_size;
  if (target == 0) return img;
  const int h = img.height();
  const int w = img.width();
  int rh = target;
  int rw = target;
  if (h < w) {
    rw = static_cast<int>(std::lround(static_cast<double>(w) * target / h));
  } else if (w < h) {
    rh = static_cast<int>(std::lround(static_cast<double>(h) * target / w));
  }
  const RasterImage resized = run_stage("resize", [&] {
    return (rh == h && rw == w) ? img : resize_to(img, rh, rw, InterpKernel::kBilinear);
  });
  return run_stage("crop", [&] { return crop(resized, target, target, cfg.crop); });
}

ScaledStack mlep_stack(const RasterImage& img, const MlepConfig& cfg) {
  run_stage("config", [&] { cfg.validate(); return 0; });
  RasterImage base = prepare_input(img, cfg);
  const PatchGrid grid = run_stage("shuffle", [&] {
    return partition_grid(base.height(), base.width(), cfg.patch_size);
  });
  if (grid.needs_crop(base.height(), base.width())) {
    base = run_stage("crop", [&] {
      RasterImage out(grid.crop_height, grid.crop_width, base.channels());
      for (int c = 0; c < base.channels(); ++c)
        for (int y = 0; y < grid.crop_height; ++y)
          for (int x = 0; x < grid.crop_width; ++x)
            out.at(c, y, x) = base.at(c, y + grid.crop_top, x + grid.crop_left);
      return out;
    });
  }
  const RasterImage shuffled =
      run_stage("shuffle", [&] { return shuffle_image(base, cfg.patch_size, cfg.seed).image; });
  return run_stage("resample", [&] { return build_stack(shuffled, cfg.scales, cfg.interp); });
}

LepMap extract_mlep(const RasterImage& img, const MlepConfig& cfg, int threads) {
  const ScaledStack stack = mlep_stack(img, cfg);
  return run_stage("lep", [&] { return lep_fast(stack, cfg.stride, threads); });
}

}  // namespace mlep
