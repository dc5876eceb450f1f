#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <optional>

#include "CLI11.hpp"
#include "mlep/error.hpp"
#include "mlep/evalkit.hpp"
#include "mlep/file_util.hpp"
#include "mlep/image_codec.hpp"
#include "mlep/learn.hpp"
#include "mlep/parallel.hpp"
#include "mlep/spectrum.hpp"

namespace mlep::cli {

namespace fs = std::filesystem;

namespace {

std::string format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

// Options were validated up front, so anything thrown later is about the data.
int fail(std::ostream& err, const Error& e) {
  err << "error: " << e.what() << "\n";
  return kExitData;
}

/// Config problems in options are usage errors, whatever the subcommand.
std::optional<int> check_config(const MlepConfig& cfg, std::ostream& err) {
  try {
    cfg.validate();
    return std::nullopt;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

std::vector<fs::path> collect_inputs(const fs::path& input) {
  std::error_code ec;
  if (fs::is_directory(input, ec)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(input)) {
      if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
  }
  if (!fs::exists(input, ec)) {
    throw Error(ErrorCode::kIo, "input " + input.string() + " does not exist");
  }
  return {input};
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create directory " + dir.string());
}

std::string dims(int h, int w, int c) {
  return std::to_string(h) + "x" + std::to_string(w) + "x" + std::to_string(c);
}

struct ConfigFlags {
  int patch = 2;
  std::string scales = "1,0.5,0.25";
  std::string interp = "bilinear";
  int stride = 1;
  std::uint64_t seed = 0;
  int input_size = 224;
};

void add_config_flags(CLI::App* app, ConfigFlags& f) {
  app->add_option("--patch", f.patch, "Patch size for shuffling (2, 4 or 8)");
  app->add_option("--scales", f.scales, "Comma-separated resampling scales, first must be 1");
  app->add_option("--interp", f.interp, "Resampling kernel")
      ->check(CLI::IsMember({"nearest", "bilinear", "bicubic"}));
  app->add_option("--stride", f.stride, "LEP window stride (1 or 2)");
  app->add_option("--seed", f.seed, "Base shuffle seed (overridden by MLEP_SEED)");
  app->add_option("--input-size", f.input_size,
                  "Shorter side is resized to this, then centre-cropped square (0 = native)");
}

MlepConfig to_config(const ConfigFlags& f) {
  MlepConfig cfg;
  cfg.patch_size = f.patch;
  cfg.scales = ScaleSet::parse(f.scales);
  cfg.interp = parse_interp(f.interp);
  cfg.stride = f.stride;
  cfg.seed = f.seed;
  cfg.input_size = f.input_size;
  if (const char* env = std::getenv(kSeedEnv); env != nullptr && *env != '\0') {
    std::uint64_t v = 0;
    const char* end = env + std::char_traits<char>::length(env);
    if (std::from_chars(env, end, v).ptr != end) {
      throw Error(ErrorCode::kConfig, std::string(kSeedEnv) + " is not an unsigned integer");
    }
    cfg.seed = v;
  }
  cfg.validate();
  return cfg;
}

}  // namespace

int cmd_extract(const ExtractOptions& opt, std::ostream& out, std::ostream& err) {
  if (auto rc = check_config(opt.config, err)) return *rc;
  std::vector<fs::path> files;
  try {
    files = collect_inputs(opt.input);
    ensure_dir(opt.out_dir);
  } catch (const Error& e) {
    return fail(err, e);
  }
  if (files.empty()) {
    err << "error: no PNG/JPEG files in " << opt.input.string() << "\n";
    return kExitData;
  }

  std::vector<std::string> lines(files.size());
  std::vector<bool> ok(files.size(), false);
  parallel_for(files.size(), opt.jobs, [&](std::size_t i) {
    const fs::path& file = files[i];
    try {
      const RasterImage img = decode_image(read_file(file));
      const MlepConfig cfg = per_image_config(opt.config, image_id(file), ExtractMode::kEval);
      const LepMap map = extract_mlep(img, cfg);
      const fs::path target = opt.out_dir / (file.stem().string() + ".mlep");
      write_file_atomic(target, encode_tensor(FeatureTensor::from_lep(map, opt.dtype)));
      if (opt.viz) {
        const auto planes = lep_to_u8(map);
        for (std::size_t c = 0; c < planes.size(); ++c) {
          write_file_atomic(opt.out_dir / (file.stem().string() + "_c" + std::to_string(c) + ".png"),
                            encode_png(planes[c]));
        }
      }
      lines[i] = file.filename().string() + ": " + dims(map.height, map.width, map.channels) +
                 (opt.dtype == TensorDtype::kF32 ? " f32" : " level") + " -> " + target.string();
      ok[i] = true;
    } catch (const Error& e) {
      lines[i] = file.string() + ": " + e.what();
    }
  });

  std::size_t failures = 0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (ok[i]) {
      out << lines[i] << "\n";
    } else {
      err << "error: " << lines[i] << "\n";
      ++failures;
    }
  }
  return failures == files.size() ? kExitData : kExitOk;
}

int cmd_hist(const HistOptions& opt, std::ostream& out, std::ostream& err) {
  if (auto rc = check_config(opt.config, err)) return *rc;
  try {
    const Manifest manifest = Manifest::load(opt.manifest);
    const HistogramReport report = entropy_histogram_report(manifest, opt.config, opt.jobs);
    for (const auto& w : report.warnings) err << "warning: skipped " << w << "\n";
    if (report.n_real + report.n_fake == 0) {
      err << "error: no readable images in manifest\n";
      return kExitData;
    }
    write_file_atomic(opt.out_csv, report.to_csv());
    out << "real: " << report.n_real << "  fake: " << report.n_fake
        << "  skipped: " << report.skipped << "\n";
    out << "P(level 2.0)  real: " << format("%.4f", report.real[4])
        << "  fake: " << format("%.4f", report.fake[4]) << "\n";
    return kExitOk;
  } catch (const Error& e) {
    return fail(err, e);
  }
}

int cmd_diff(const DiffOptions& opt, std::ostream& out, std::ostream& err) {
  if (auto rc = check_config(opt.config, err)) return *rc;
  try {
    const RasterImage real = read_image(opt.real);
    const RasterImage fake = read_image(opt.fake);
    const DiffReport report = diff_report(real, fake, opt.config);
    ensure_dir(opt.out_dir);
    write_file_atomic(opt.out_dir / "pixel_diff.png", encode_png(report.pixel_diff));
    write_file_atomic(opt.out_dir / "entropy_diff.png", encode_png(report.entropy_diff));
    write_file_atomic(opt.out_dir / "spectrum_diff.png", encode_png(report.spectrum_diff));
    write_file_atomic(opt.out_dir / "stats.json", report.stats_json() + "\n");
    out << "pixel: " << format("%.4f", report.stats.pixel)
        << "  entropy: " << format("%.4f", report.stats.entropy)
        << "  spectrum: " << format("%.4f", report.stats.spectrum) << "\n";
    return kExitOk;
  } catch (const Error& e) {
    return fail(err, e);
  }
}

int cmd_train(const TrainOptions& opt, std::ostream& out, std::ostream& err) {
  if (auto rc = check_config(opt.config, err)) return *rc;
  try {
    TrainParams params;
    params.seed = opt.config.seed;
    params.epochs = opt.epochs;
    params.learning_rate = opt.learning_rate;
    params.batch_size = opt.batch_size;
    params.hidden_dim = opt.hidden;
    if (params.epochs < 1 || params.batch_size < 1 || params.hidden_dim < 1 ||
        !(params.learning_rate > 0.0)) {
      err << "error: --epochs, --batch and --hidden must be >= 1 and --lr > 0\n";
      return kExitUsage;
    }
    const Manifest manifest = Manifest::load(opt.manifest);
    const DetectorModel model = train_from_manifest(manifest, opt.config, params, opt.jobs);
    write_file_atomic(opt.model, model.to_json() + "\n");
    out << "trained on " << manifest.indices(Split::kTrain).size() << " images, final loss "
        << format("%.6f", model.training.final_loss) << " -> " << opt.model.string() << "\n";
    return kExitOk;
  } catch (const Error& e) {
    return fail(err, e);
  }
}

int cmd_eval(const EvalOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    const auto bytes = read_file(opt.model);
    const DetectorModel model =
        DetectorModel::from_json(std::string(bytes.begin(), bytes.end()));
    const MlepConfig cfg = model.config.value_or(MlepConfig{});
    const Manifest manifest = Manifest::load(opt.manifest);
    const EvalReport report = evaluate(model, manifest, cfg, opt.jobs);
    if (!opt.report.empty()) write_file_atomic(opt.report, report.to_json() + "\n");
    out << "Acc: " << format("%.4f", report.accuracy)
        << "  AP: " << format("%.4f", report.average_precision) << "\n";
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
}

int cmd_bench(const BenchOptions& opt, std::ostream& out, std::ostream& err) {
  if (opt.iters < 1 || opt.size < 2 || opt.channels < 1) {
    err << "error: --iters must be >= 1, --size >= 2, --channels >= 1\n";
    return kExitUsage;
  }
  const BenchResult r = run_lep_bench(opt);
  out << "lep benchmark: " << dims(opt.size, opt.size, opt.channels) << " stack, " << opt.iters
      << " iterations, stride 1, 1 thread\n";
  out << "kernel    ns/pixel    ms/iter\n";
  out << "naive   " << format("%10.3f", r.naive_ns_per_pixel) << " "
      << format("%10.3f", r.naive_ms_per_iter) << "\n";
  out << "fast    " << format("%10.3f", r.fast_ns_per_pixel) << " "
      << format("%10.3f", r.fast_ms_per_iter) << "\n";
  out << "speedup " << format("%10.2f", r.speedup()) << "\n";
  out << "outputs " << (r.outputs_equal ? "equal" : "DIFFER") << "\n";
  if (!r.outputs_equal) {
    err << "error: lep_fast and lep_naive disagree\n";
    return kExitInternal;
  }
  return kExitOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-granularity local entropy pattern extraction and detection"};
  app.name(args.empty() ? "mlep" : fs::path(args[0]).filename().string());
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  const int jobs_default = default_jobs();

  ConfigFlags extract_cfg;
  ExtractOptions ex;
  std::string dtype = "level";
  ex.jobs = jobs_default;
  auto* extract = app.add_subcommand("extract", "Write one .mlep tensor per input image");
  extract->add_option("--input", ex.input, "Image file or directory of PNG/JPEG files")->required();
  extract->add_option("--out", ex.out_dir, "Output directory")->required();
  add_config_flags(extract, extract_cfg);
  extract->add_option("--dtype", dtype, "Tensor element type")->check(CLI::IsMember({"level", "f32"}));
  extract->add_flag("--viz", ex.viz, "Also write one PNG per LEP channel");
  extract->add_option("--jobs", ex.jobs, "Worker threads")->check(CLI::PositiveNumber);

  ConfigFlags hist_cfg;
  HistOptions hi;
  hi.jobs = jobs_default;
  auto* hist = app.add_subcommand("hist", "Per-class mean entropy-level distribution (CSV)");
  hist->add_option("--manifest", hi.manifest, "Manifest CSV (path,label,split)")->required();
  hist->add_option("--out", hi.out_csv, "Output CSV")->required();
  add_config_flags(hist, hist_cfg);
  hist->add_option("--jobs", hi.jobs, "Worker threads")->check(CLI::PositiveNumber);

  ConfigFlags diff_cfg;
  DiffOptions di;
  auto* diff = app.add_subcommand("diff", "Pixel / entropy / Fourier difference maps for a pair");
  diff->add_option("--real", di.real, "Real image")->required();
  diff->add_option("--fake", di.fake, "Fake image")->required();
  diff->add_option("--out", di.out_dir, "Output directory")->required();
  add_config_flags(diff, diff_cfg);

  ConfigFlags train_cfg;
  TrainOptions tr;
  tr.jobs = jobs_default;
  auto* train_cmd = app.add_subcommand("train", "Train the histogram MLP detector");
  train_cmd->add_option("--manifest", tr.manifest, "Manifest CSV (train split is used)")->required();
  train_cmd->add_option("--model", tr.model, "Output model JSON")->required();
  add_config_flags(train_cmd, train_cfg);
  train_cmd->add_option("--epochs", tr.epochs, "Training epochs");
  train_cmd->add_option("--lr", tr.learning_rate, "Adam learning rate");
  train_cmd->add_option("--batch", tr.batch_size, "Mini-batch size");
  train_cmd->add_option("--hidden", tr.hidden, "Hidden units");
  train_cmd->add_option("--jobs", tr.jobs, "Worker threads")->check(CLI::PositiveNumber);

  EvalOptions ev;
  ev.jobs = jobs_default;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a trained model on the test split");
  eval_cmd->add_option("--manifest", ev.manifest, "Manifest CSV (test split is used)")->required();
  eval_cmd->add_option("--model", ev.model, "Model JSON written by train")->required();
  eval_cmd->add_option("--report", ev.report, "Optional JSON report path");
  eval_cmd->add_option("--jobs", ev.jobs, "Worker threads")->check(CLI::PositiveNumber);

  BenchOptions be;
  auto* bench = app.add_subcommand("bench", "Time lep_naive vs lep_fast on random data");
  bench->add_option("--size", be.size, "Stack height and width");
  bench->add_option("--channels", be.channels, "Stack channels");
  bench->add_option("--iters", be.iters, "Timed iterations per kernel");
  bench->add_option("--seed", be.seed, "Data seed");

  std::vector<const char*> argv;
  argv.push_back(args.empty() ? "mlep" : args[0].c_str());
  for (std::size_t i = 1; i < args.size(); ++i) argv.push_back(args[i].c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*extract) {
      ex.config = to_config(extract_cfg);
      ex.dtype = dtype == "f32" ? TensorDtype::kF32 : TensorDtype::kLevelU8;
      return cmd_extract(ex, out, err);
    }
    if (*hist) {
      hi.config = to_config(hist_cfg);
      return cmd_hist(hi, out, err);
    }
    if (*diff) {
      di.config = to_config(diff_cfg);
      return cmd_diff(di, out, err);
    }
    if (*train_cmd) {
      tr.config = to_config(train_cfg);
      return cmd_train(tr, out, err);
    }
    if (*eval_cmd) return cmd_eval(ev, out, err);
    if (*bench) return cmd_bench(be, out, err);
  } catch (const Error& e) {
    // Anything escaping a subcommand before it ran is a bad flag value.
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kConfig || e.code() == ErrorCode::kParse ? kExitUsage
                                                                           : kExitData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace mlep::cli
