// SPDX-License-Identifier: Apache-2.0
//
// Acceptance runner. Prints one "A<n> PASS|FAIL ..." line per criterion and
// exits non-zero when any selected criterion fails.
//
//   sphergeo_acceptance            all criteria
//   sphergeo_acceptance --only A3  a single criterion
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sphergeo/augment.hpp"
#include "sphergeo/bench.hpp"
#include "sphergeo/dataio.hpp"
#include "sphergeo/evaluation.hpp"
#include "sphergeo/iou.hpp"
#include "sphergeo/losses.hpp"
#include "sphergeo/nms.hpp"

using namespace sphergeo;

namespace {

// Tolerances.
constexpr double kA1FovTarget = 0.59, kA1FovTol = 0.015;
constexpr double kA1SphTarget = 0.33, kA1SphTol = 0.01;
constexpr double kA1ExactTarget = 0.57, kA1ExactTol = 0.01;
constexpr double kA1MaxSeconds = 5.0;
constexpr std::size_t kA1Samples = 10'000'000;

constexpr double kA2FovTol = 0.01;
constexpr double kA2SphTol = 0.01;
constexpr double kA2SphTolRow2 = 0.015;
constexpr double kA2ExactTol = 0.015;
constexpr double kA2MaxSeconds = 60.0;
constexpr std::size_t kA2Samples = 10'000'000;

constexpr std::size_t kA3Calls = 10'000;
constexpr int kA3Runs = 5;
constexpr double kA3ExactOverFov = 10.0;
constexpr double kA3MaxSeconds = 120.0;

constexpr int kA4Pairs = 200;
constexpr std::size_t kA4Samples = 1'000'000;
constexpr double kA4Sigmas = 3.0;
constexpr double kA4Slack = 1e-3;
constexpr double kA4MaxSeconds = 300.0;

constexpr int kA5Pairs = 100;
constexpr double kA5Step = 1e-4;
constexpr double kA5Tol = 1e-4;
constexpr double kA5MinKinkMargin = 1e-3;

constexpr double kA6MinPsnr = 30.0;
constexpr double kA6MaxPixelError = 1.0;

constexpr int kA7Pairs = 200;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool within(double v, double target, double tol) { return std::abs(v - target) <= tol; }

// A1 -------------------------------------------------------------------------

Outcome a1() {
  const auto t0 = std::chrono::steady_clock::now();
  const FovBBox b1(30, 60, 60, 60), b2(60, 60, 60, 60);
  const double f = fov_iou(b1, b2);
  const double s = sph_iou(b1, b2);
  const double e = exact_iou(b1, b2);
  const McEstimate mc = mc_iou(b1, b2, kA1Samples, 1);
  const double t = seconds_since(t0);
  const bool ok = within(f, kA1FovTarget, kA1FovTol) && within(s, kA1SphTarget, kA1SphTol) &&
                  within(e, kA1ExactTarget, kA1ExactTol) && within(mc.iou, kA1ExactTarget, kA1ExactTol) &&
                  t < kA1MaxSeconds;
  return {ok, "fov=" + fmt("%.4f", f) + " sph=" + fmt("%.4f", s) + " exact=" + fmt("%.4f", e) +
                  " mc=" + fmt("%.4f", mc.iou) + " time=" + fmt("%.2fs", t)};
}

// A2 -------------------------------------------------------------------------

struct ReferenceRow {
  FovBBox b1, b2;
  double fov;
  std::optional<double> sph;
  double sph_tol;
  double exact;
};

Outcome a2() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::array<ReferenceRow, 4> rows{{
      {FovBBox(40, 50, 35, 55), FovBBox(35, 20, 37, 50), 0.235, 0.227, kA2SphTol, 0.248},
      {FovBBox(30, 60, 60, 60), FovBBox(55, 40, 60, 60), 0.323, 0.250, kA2SphTolRow2, 0.325},
      {FovBBox(50, -78, 25, 46), FovBBox(30, -75, 26, 45), 0.617, 0.112, kA2SphTol, 0.627},
      {FovBBox(40, 70, 25, 30), FovBBox(60, 85, 30, 30), 0.259, 0.073, kA2SphTol, 0.267},
  }};
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ReferenceRow& r = rows[i];
    const double f = fov_iou(r.b1, r.b2);
    const double s = sph_iou(r.b1, r.b2);
    const double e = exact_iou(r.b1, r.b2);
    const McEstimate mc = mc_iou(r.b1, r.b2, kA2Samples, 2 + i);
    const bool f_ok = within(f, r.fov, kA2FovTol);
    const bool s_ok = !r.sph || within(s, *r.sph, r.sph_tol);
    const bool e_ok = within(e, r.exact, kA2ExactTol) && within(mc.iou, r.exact, kA2ExactTol);
    ok = ok && f_ok && s_ok && e_ok;
    detail += " row" + std::to_string(i + 1) + "[fov=" + fmt("%.4f", f) + (f_ok ? "" : "!") +
              " sph=" + fmt("%.4f", s) + (s_ok ? "" : "!") + " exact=" + fmt("%.4f", e) +
              " mc=" + fmt("%.4f", mc.iou) + (e_ok ? "" : "!") + " want " + fmt("%.3f", r.exact) + "]";
  }
  const double t = seconds_since(t0);
  ok = ok && t < kA2MaxSeconds;
  return {ok, detail.substr(1) + " time=" + fmt("%.1fs", t)};
}

// A3 -------------------------------------------------------------------------

Outcome a3() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::string> methods{"sph", "fov", "exact"};
  std::array<std::vector<double>, 3> means;
  for (int run = 0; run < kA3Runs; ++run) {
    const auto res = run_bench(methods, kA3Calls, 42);
    for (std::size_t m = 0; m < 3; ++m) means[m].push_back(res[m].mean_ns);
  }
  std::array<double, 3> med{};
  for (std::size_t m = 0; m < 3; ++m) {
    std::sort(means[m].begin(), means[m].end());
    med[m] = means[m][kA3Runs / 2];
  }
  const double t = seconds_since(t0);
  const bool ok = med[0] <= med[1] && med[1] <= med[2] && med[2] >= kA3ExactOverFov * med[1] && t < kA3MaxSeconds;
  return {ok, "median mean_ns sph=" + fmt("%.1f", med[0]) + " fov=" + fmt("%.1f", med[1]) +
                  " exact=" + fmt("%.1f", med[2]) + " exact/fov=" + fmt("%.1f", med[2] / med[1]) +
                  " time=" + fmt("%.1fs", t)};
}

// A4 -------------------------------------------------------------------------

Outcome a4() {
  const auto t0 = std::chrono::steady_clock::now();
  sgtest::BoxGen g(4004);
  int done = 0, bad = 0;
  double worst = 0.0;
  while (done < kA4Pairs) {
    const FovBBox a = g.box(-70, 70, 10, 90);
    const FovBBox b = g.near(a, 20, -70, 70);
    if (sgtest::pole_adjacent(a) || sgtest::pole_adjacent(b)) continue;
    const double e = exact_iou(a, b);
    if (e <= 0.0) continue;
    const McEstimate mc = mc_iou(a, b, kA4Samples, 1000 + static_cast<std::uint64_t>(done));
    const double dev = std::abs(e - mc.iou) / (kA4Sigmas * mc.std_error + kA4Slack);
    worst = std::max(worst, dev);
    bad += dev > 1.0 ? 1 : 0;
    ++done;
  }
  const double t = seconds_since(t0);
  return {bad == 0 && t < kA4MaxSeconds, std::to_string(done) + " pairs, " + std::to_string(bad) +
                                             " outside 3sigma+1e-3, worst ratio " + fmt("%.3f", worst) +
                                             " time=" + fmt("%.1fs", t)};
}

// A5 -------------------------------------------------------------------------

FovBBox nudged(const FovBBox& b, std::size_t k, double h) {
  std::array<double, 4> f{b.lon(), b.lat(), b.fov_h(), b.fov_v()};
  f[k] += h;
  return FovBBox(f[0], f[1], f[2], f[3]);
}

Outcome a5() {
  sgtest::BoxGen g(5005);
  int done = 0;
  double worst = 0.0;
  while (done < kA5Pairs) {
    const FovBBox a = g.box(-70, 70, 10, 80);
    const FovBBox b = g.near(a, 25, -70, 70);
    const LossGradient grad = loss_gradient(a, b, LossKind::kFovGIoU);
    if (grad.kink_margin <= kA5MinKinkMargin) continue;
    for (std::size_t k = 0; k < 4; ++k) {
      const double fd = (fov_giou_loss(a, nudged(b, k, kA5Step)).value -
                         fov_giou_loss(a, nudged(b, k, -kA5Step)).value) /
                        (2 * kA5Step);
      worst = std::max(worst, std::abs(fd - grad.d_detected[k]));
    }
    ++done;
  }
  return {worst <= kA5Tol, std::to_string(done) + " pairs, max |analytic - fd| = " + fmt("%.3e", worst)};
}

// A6 -------------------------------------------------------------------------

std::string a6_iou(sgtest::BoxGen& g) {
  for (int i = 0; i < 300; ++i) {
    const FovBBox a = g.box(-80, 80, 5, 120);
    const FovBBox b = g.coin() ? g.near(a, 20) : g.box(-80, 80, 5, 120);
    const double shift = g.uniform(-180, 180);
    const FovBBox ay(a.lon() + shift, a.lat(), a.fov_h(), a.fov_v());
    const FovBBox by(b.lon() + shift, b.lat(), b.fov_h(), b.fov_v());
    for (const IoUMethod& m : {IoUMethod::fov(), IoUMethod::sph(), IoUMethod::exact()}) {
      const double v = iou(a, b, m);
      if (v != iou(b, a, m) && std::abs(v - iou(b, a, m)) > 1e-12) return "iou symmetry (" + m.name() + ")";
      if (!(v >= 0.0 && v <= 1.0)) return "iou range (" + m.name() + ")";
      if (iou(a, a, m) != 1.0 && std::abs(iou(a, a, m) - 1.0) > 1e-12) return "iou identity (" + m.name() + ")";
      if (std::abs(iou(ay, by, m) - v) > 1e-9) return "iou joint-yaw invariance (" + m.name() + ")";
    }
  }
  return "";
}

std::string a6_nms(sgtest::BoxGen& g) {
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Detection> dets;
    const FovBBox anchor = g.box(-60, 60, 20, 40);
    for (int i = 0; i < 20; ++i) {
      dets.push_back({g.coin() ? g.near(anchor, 15, -80, 80) : g.box(), g.uniform(0, 1), g.coin() ? 1 : 2, 1});
    }
    const double thr = g.uniform(0.1, 0.9);
    for (const IoUMethod& m : {IoUMethod::fov(), IoUMethod::sph()}) {
      const auto kept = nms(dets, thr, m);
      for (const auto& k : kept) {
        if (std::find(dets.begin(), dets.end(), k) == dets.end()) return "nms subset";
      }
      if (nms(kept, thr, m) != kept) return "nms idempotence";
    }
  }
  return "";
}

std::string a6_ap() {
  const DatasetFile ds = sgtest::six_gt_fixture();
  const auto dets = sgtest::eight_det_fixture();
  const EvalReport base = evaluate(ds, dets);
  auto scaled = dets;
  for (auto& d : scaled) d.score = d.score * d.score * 0.5;
  const EvalReport r = evaluate(ds, scaled);
  if (r.overall.ap != base.overall.ap || r.overall.ap50 != base.overall.ap50 || r.overall.ap75 != base.overall.ap75) {
    return "AP score-rescaling invariance";
  }
  return "";
}

std::string a6_augment(double& min_psnr, double& max_px) {
  const ErpImage img = sgtest::natural_image(512, 256);
  min_psnr = 1e9;
  for (const RotationSpec spec : {RotationSpec{37, 20}, RotationSpec{200, -30}, RotationSpec{300, 10}}) {
    const ErpImage back = remap_erp(remap_erp(remap_erp(img, spec), {0.0, -spec.pitch}), {360.0 - spec.yaw, 0.0});
    min_psnr = std::min(min_psnr, sgtest::psnr(img, back, 256 / 8));
  }
  if (min_psnr < kA6MinPsnr) return "augmentation round-trip PSNR";

  const int w = 256, h = 128;
  sgtest::BoxGen g(6060);
  max_px = 0.0;
  for (int i = 0; i < 10; ++i) {
    const FovBBox b = g.box(-50, 50, 10, 30);
    const RotationSpec spec{g.uniform(0, 360), g.uniform(-30, 30)};
    ErpImage blob(w, h, 1);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double d = great_circle_distance(erp_pixel_to_sph(x, y, w, h), b.center());
        blob.at(x, y, 0) = static_cast<std::uint8_t>(std::lround(250.0 * std::exp(-d * d / (2 * 0.03 * 0.03))));
      }
    }
    const ErpImage out = remap_erp(blob, spec);
    int bx = 0, by = 0;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (out.at(x, y, 0) > out.at(bx, by, 0)) {
          bx = x;
          by = y;
        }
      }
    }
    const PixelCoord want = sph_to_erp_pixel(transform_bbox(b, spec).center(), w, h);
    double du = std::abs(bx - want.u);
    du = std::min(du, w - du);
    max_px = std::max({max_px, du, std::abs(by - want.v)});
  }
  if (max_px > kA6MaxPixelError) return "box/image consistency";
  return "";
}

std::string a6_dataset(sgtest::BoxGen& g) {
  sgtest::TempDir dir;
  for (int s = 0; s < 20; ++s) {
    DatasetFile ds;
    ds.images = {{1, "a.png", 1920, 960}, {2, "sub/b.jpg", 1920, 960}};
    ds.categories = {{1, "chair"}, {7, "lamp"}};
    for (int i = 0; i < 15; ++i) ds.annotations.push_back({i + 1, g.box(-90, 90, 0.01, 179.99), g.coin() ? 1 : 7, 1 + i % 2});
    save_dataset(ds, dir / "ds.json");
    if (load_dataset(dir / "ds.json") != ds) return "dataset save/load identity";
  }
  return "";
}

Outcome a6() {
  sgtest::BoxGen g(6006);
  double psnr = 0.0, px = 0.0;
  for (const std::function<std::string()>& suite :
       std::vector<std::function<std::string()>>{[&] { return a6_iou(g); }, [&] { return a6_nms(g); },
                                                 [] { return a6_ap(); }, [&] { return a6_augment(psnr, px); },
                                                 [&] { return a6_dataset(g); }}) {
    const std::string failed = suite();
    if (!failed.empty()) return {false, "failed: " + failed};
  }
  return {true, "iou, nms, ap, augmentation (min psnr " + fmt("%.1f dB", psnr) + ", max offset " +
                    fmt("%.2f px", px) + "), dataset round trip"};
}

// A7 -------------------------------------------------------------------------

Outcome a7() {
  sgtest::BoxGen g(7007);
  double fov_err = 0.0, sph_err = 0.0;
  int done = 0;
  while (done < kA7Pairs) {
    const double sign = g.coin() ? 1.0 : -1.0;
    const FovBBox a(g.uniform(-180, 180), sign * g.uniform(50, 75), g.uniform(10, 40), g.uniform(10, 30));
    const FovBBox b = g.near(a, 10, -80, 80);
    const double e = exact_iou(a, b);
    if (e <= 0.0) continue;
    fov_err += std::abs(fov_iou(a, b) - e);
    sph_err += std::abs(sph_iou(a, b) - e);
    ++done;
  }
  fov_err /= done;
  sph_err /= done;
  return {fov_err < sph_err,
          "mean |fov-exact|=" + fmt("%.4f", fov_err) + " mean |sph-exact|=" + fmt("%.4f", sph_err)};
}

// A8 -------------------------------------------------------------------------

Outcome a8() {
  const DatasetFile ds = sgtest::six_gt_fixture();
  const auto dets = sgtest::eight_det_fixture();
  bool ok = true;
  std::string detail;
  for (const IoUMethod& m : {IoUMethod::fov(), IoUMethod::sph(), IoUMethod::exact()}) {
    const EvalReport r = evaluate(ds, dets, {m});
    const sgtest::RefAp ref = sgtest::ref_report(ds, dets, m);
    const bool same = r.overall.ap == ref.ap && r.overall.ap50 == ref.ap50 && r.overall.ap75 == ref.ap75;
    ok = ok && same;
    detail += " " + m.name() + " AP=" + fmt("%.6f", r.overall.ap.value_or(-1)) + (same ? "" : " (reference " +
              fmt("%.6f", ref.ap.value_or(-1)) + ")");
  }
  return {ok, detail.substr(1)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"A1", a1}, {"A2", a2}, {"A3", a3}, {"A4", a4}, {"A5", a5}, {"A6", a6}, {"A7", a7}, {"A8", a8}};
  std::string only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = argv[++i];
    } else {
      std::fprintf(stderr, "usage: %s [--only A<n>]\n", argv[0]);
      return 2;
    }
  }
  bool all_ok = true;
  bool ran = false;
  for (const auto& [name, fn] : criteria) {
    if (!only.empty() && only != name) continue;
    ran = true;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s %s\n", name.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    all_ok = all_ok && o.pass;
  }
  if (!ran) {
    std::fprintf(stderr, "unknown criterion %s\n", only.c_str());
    return 2;
  }
  return all_ok ? 0 : 1;
}
