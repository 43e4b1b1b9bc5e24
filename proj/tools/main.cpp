// SPDX-License-Identifier: Apache-2.0
//
// sphergeo command-line tool. Exit codes: 0 success, 1 usage error, 2 data
// error.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sphergeo/augment.hpp"
#include "sphergeo/bench.hpp"
#include "sphergeo/dataio.hpp"
#include "sphergeo/evaluation.hpp"
#include "sphergeo/iou.hpp"
#include "sphergeo/nms.hpp"

namespace fs = std::filesystem;
using namespace sphergeo;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::optional<unsigned> threads;
  std::uint64_t seed = 0;
  std::size_t samples = 1'000'000;
  std::string method = "fov";

  unsigned resolved_threads() const {
    if (threads) return *threads;
    const char* env = std::getenv("SPHERGEO_THREADS");
    if (env == nullptr || *env == '\0') return 0;
    try {
      std::size_t used = 0;
      const long v = std::stol(env, &used);
      if (used != std::string(env).size() || v < 0) throw std::invalid_argument(env);
      return static_cast<unsigned>(v);
    } catch (const std::exception&) {
      throw UsageError(std::string("SPHERGEO_THREADS must be a non-negative integer, got '") + env + "'");
    }
  }

  IoUMethod iou_method() const {
    if (method == "mc") return IoUMethod::monte_carlo(samples, seed);
    return IoUMethod::parse(method);
  }
};

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    write_text_file(out, text);
  }
}

void add_method_options(CLI::App* cmd, Common& c) {
  cmd->add_option("--method,-m", c.method, "IoU method")
      ->check(CLI::IsMember({"fov", "sph", "exact", "mc"}))
      ->capture_default_str();
  cmd->add_option("--samples", c.samples, "Monte-Carlo samples (mc)")
      ->check(CLI::Range(std::size_t{1000}, std::size_t{1'000'000'000}))
      ->capture_default_str();
  cmd->add_option("--seed", c.seed, "random seed")->capture_default_str();
}

int cmd_iou(const Common& c, const std::string& a_path, const std::string& b_path, const std::string& out) {
  const auto a = load_boxes(a_path);
  const auto b = load_boxes(b_path);
  const IoUMatrix m = iou_matrix(a, b, c.iou_method(), c.resolved_threads());
  std::string csv;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) csv += ',';
      csv += fixed(m.at(i, j), 6);
    }
    csv += '\n';
  }
  emit(csv, out);
  return kExitOk;
}

int cmd_nms(const Common& c, const std::string& det_path, double thr, const std::string& out) {
  const auto dets = load_predictions(det_path);
  emit(dump_predictions(nms_per_image(dets, thr, c.iou_method())), out);
  return kExitOk;
}

int cmd_eval(const Common& c, const std::string& gt_path, const std::string& det_path,
             const std::vector<std::string>& bands, const std::string& out) {
  const DatasetFile gt = load_dataset(gt_path);
  const auto dets = load_predictions(det_path);
  EvalOptions opt;
  opt.method = c.iou_method();
  opt.threads = c.resolved_threads();
  if (!bands.empty()) {
    opt.bands.clear();
    for (const auto& s : bands) {
      try {
        opt.bands.push_back(LatBand::parse(s));
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
    }
  }
  const EvalReport report = evaluate(gt, dets, opt);
  if (!out.empty()) write_text_file(out, report_to_json(report));
  std::cout << format_report_table(report);
  return kExitOk;
}

int cmd_augment(const Common& c, const std::string& images, const std::string& ann, const std::string& out,
                const AugmentConfig& cfg) {
  const std::string text = read_text_file(ann);
  const DatasetFile ds = parse_dataset(text);
  const AugmentResult result = augment_dataset(ds, cfg);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create " + out + ": " + ec.message());
  write_augmented_images(result, images, out, c.resolved_threads());
  const fs::path ann_out = fs::path(out) / fs::path(ann).filename();
  // Nothing added: hand back the input untouched.
  write_text_file(ann_out, result.new_images.empty() ? text : dump_dataset(result.dataset));
  std::cout << "images: " << result.dataset.images.size() << " (" << result.new_images.size() << " new)\n"
            << "annotations: " << result.dataset.annotations.size() << "\n"
            << "dropped boxes: " << result.dropped.size() << "\n";
  for (const auto& d : result.dropped) {
    std::cerr << "warning: annotation " << d.annotation_id << " of image " << d.source_image_id
              << " dropped (center rotated onto a pole)\n";
  }
  return kExitOk;
}

int cmd_bench(const Common& c, std::size_t n, double warmup) {
  const std::vector<std::string> methods{"sph", "fov", "exact"};
  const auto results = run_bench(methods, n, c.seed, warmup);
  std::cout << "method,n_calls,mean_ns,p50_ns,p95_ns,pairs_per_sec\n";
  double fov = 0.0;
  double sph = 0.0;
  double exact = 0.0;
  for (const auto& r : results) {
    std::cout << r.method << ',' << r.n_calls << ',' << fixed(r.mean_ns, 1) << ',' << fixed(r.p50_ns, 1) << ','
              << fixed(r.p95_ns, 1) << ',' << fixed(1e9 / r.mean_ns, 0) << '\n';
    if (r.method == "fov") fov = r.mean_ns;
    if (r.method == "sph") sph = r.mean_ns;
    if (r.method == "exact") exact = r.mean_ns;
  }
  std::cout << "ratio_exact_fov," << fixed(exact / fov, 2) << '\n'
            << "ratio_fov_sph," << fixed(fov / sph, 2) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Field-of-View bounding-box geometry on the sphere"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", "sphergeo 0.1.0");

  Common common;
  unsigned threads = 0;
  app.add_option("--threads,-j", threads, "worker threads (0 = all cores; default from SPHERGEO_THREADS)");

  std::string a_path, b_path, out;
  auto* iou = app.add_subcommand("iou", "IoU matrix of two box lists as CSV");
  iou->add_option("--a", a_path, "box list or dataset")->required()->check(CLI::ExistingFile);
  iou->add_option("--b", b_path, "box list or dataset")->required()->check(CLI::ExistingFile);
  iou->add_option("--out,-o", out, "output CSV (default stdout)");
  add_method_options(iou, common);

  std::string det_path;
  double iou_thr = 0.5;
  auto* nms = app.add_subcommand("nms", "per-image non-maximum suppression");
  nms->add_option("--det", det_path, "prediction file")->required()->check(CLI::ExistingFile);
  nms->add_option("--iou-thr", iou_thr, "suppression threshold")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  nms->add_option("--out,-o", out, "output prediction file (default stdout)");
  add_method_options(nms, common);

  std::string gt_path;
  std::vector<std::string> bands;
  auto* eval = app.add_subcommand("eval", "COCO-style AP with latitude bands");
  eval->add_option("--gt", gt_path, "ground-truth dataset")->required()->check(CLI::ExistingFile);
  eval->add_option("--det", det_path, "prediction file")->required()->check(CLI::ExistingFile);
  eval->add_option("--lat-band", bands, "absolute latitude band LO:HI (repeatable; default 50:90)");
  eval->add_option("--out,-o", out, "report JSON");
  add_method_options(eval, common);

  std::string images_dir, ann_path;
  AugmentConfig cfg;
  std::optional<double> pitch_min;
  double pitch_max = 30.0;
  auto* aug = app.add_subcommand("augment", "rotate a share of the dataset on the sphere");
  aug->add_option("--images", images_dir, "source image directory")->required()->check(CLI::ExistingDirectory);
  aug->add_option("--ann", ann_path, "dataset file")->required()->check(CLI::ExistingFile);
  aug->add_option("--out,-o", out, "output directory")->required();
  aug->add_option("--fraction", cfg.fraction, "share of augmented copies")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  aug->add_option("--pitch-max", pitch_max, "upper pitch bound (deg)")->check(CLI::Range(-90.0, 90.0))
      ->capture_default_str();
  aug->add_option("--pitch-min", pitch_min, "lower pitch bound (deg; default -pitch-max)")
      ->check(CLI::Range(-90.0, 90.0));
  aug->add_option("--seed", common.seed, "random seed")->capture_default_str();

  std::size_t bench_n = 10'000;
  double warmup = 0.1;
  auto* bench = app.add_subcommand("bench", "time the single-pair IoU kernels");
  bench->add_option("--n", bench_n, "timed calls per method")
      ->check(CLI::Range(kBenchMinCalls, std::size_t{100'000'000}))
      ->capture_default_str();
  bench->add_option("--warmup", warmup, "warmup fraction")->check(CLI::Range(0.0, 0.5))->capture_default_str();
  bench->add_option("--seed", common.seed, "random seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (app.count("--threads")) common.threads = threads;

  try {
    if (*iou) return cmd_iou(common, a_path, b_path, out);
    if (*nms) return cmd_nms(common, det_path, iou_thr, out);
    if (*eval) return cmd_eval(common, gt_path, det_path, bands, out);
    if (*aug) {
      cfg.seed = common.seed;
      cfg.pitch_max = pitch_max;
      cfg.pitch_min = pitch_min ? *pitch_min : -pitch_max;
      try {
        cfg.validate();
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      return cmd_augment(common, images_dir, ann_path, out, cfg);
    }
    if (*bench) return cmd_bench(common, bench_n, warmup);
  } catch (const UsageError& e) {
    std::cerr << "sphergeo: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "sphergeo: parse error: " << e.what() << "\n";
    return kExitData;
  } catch (const ValidationError& e) {
    std::cerr << "sphergeo: invalid data: " << e.what() << "\n";
    return kExitData;
  } catch (const IoError& e) {
    std::cerr << "sphergeo: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "sphergeo: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
