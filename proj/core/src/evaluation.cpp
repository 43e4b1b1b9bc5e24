// SPDX-License-Identifier: Apache-2.0
#include "sphergeo/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "sphergeo/errors.hpp"
#include "sphergeo/parallel.hpp"

namespace sphergeo {

bool LatBand::contains(double lat) const {
  const double a = std::abs(lat);
  return a >= lo && a <= hi;
}

std::string LatBand::label() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g:%g", lo, hi);
  return buf;
}

LatBand LatBand::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("latitude band must look like LO:HI, got '" + text + "'");
  LatBand b;
  try {
    std::size_t used = 0;
    b.lo = std::stod(text.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument("trailing characters");
    const std::string hi = text.substr(colon + 1);
    b.hi = std::stod(hi, &used);
    if (used != hi.size()) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw std::invalid_argument("latitude band must look like LO:HI, got '" + text + "'");
  }
  if (!(b.lo >= 0.0 && b.lo <= b.hi && b.hi <= 90.0)) {
    throw std::invalid_argument("latitude band needs 0 <= LO <= HI <= 90, got '" + text + "'");
  }
  return b;
}

std::vector<double> coco_iou_thresholds() {
  std::vector<double> t;
  for (int k = 0; k < 10; ++k) t.push_back((50.0 + 5.0 * k) / 100.0);
  return t;
}

namespace {

std::vector<std::size_t> score_order(std::span<const Detection> dets) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].score > dets[b].score; });
  return order;
}

}  // namespace

Matching match_detections(std::span<const GroundTruth> gts, std::span<const Detection> dets, double iou_threshold,
                          std::span<const double> ious) {
  if (ious.size() != gts.size() * dets.size()) throw std::invalid_argument("IoU table has the wrong size");
  Matching m;
  m.det_order = score_order(dets);
  m.det_to_gt.assign(dets.size(), -1);
  m.gt_to_det.assign(gts.size(), -1);
  for (std::size_t d : m.det_order) {
    std::int64_t best = -1;
    double best_iou = 0.0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (m.gt_to_det[g] >= 0) continue;
      const double v = ious[d * gts.size() + g];
      if (v < iou_threshold) continue;
      const bool better = best < 0 || v > best_iou ||
                          (v == best_iou && gts[g].id < gts[static_cast<std::size_t>(best)].id);
      if (better) {
        best = static_cast<std::int64_t>(g);
        best_iou = v;
      }
    }
    if (best >= 0) {
      m.det_to_gt[d] = best;
      m.gt_to_det[static_cast<std::size_t>(best)] = static_cast<std::int64_t>(d);
    }
  }
  return m;
}

Matching match_detections(std::span<const GroundTruth> gts, std::span<const Detection> dets, double iou_threshold,
                          const IoUMethod& method) {
  std::vector<double> ious(gts.size() * dets.size());
  for (std::size_t d = 0; d < dets.size(); ++d) {
    for (std::size_t g = 0; g < gts.size(); ++g) ious[d * gts.size() + g] = iou(gts[g].bbox, dets[d].bbox, method);
  }
  return match_detections(gts, dets, iou_threshold, ious);
}

std::optional<double> average_precision(std::vector<RankedHit> hits, std::size_t num_gt) {
  if (num_gt == 0) return std::nullopt;
  std::stable_sort(hits.begin(), hits.end(), [](const RankedHit& a, const RankedHit& b) { return a.score > b.score; });

  const std::size_t n = hits.size();
  std::vector<double> recall(n);
  std::vector<double> precision(n);
  std::size_t tp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (hits[i].true_positive) ++tp;
    recall[i] = static_cast<double>(tp) / static_cast<double>(num_gt);
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
  }
  // Precision envelope: max precision at any recall >= this one.
  for (std::size_t i = n; i-- > 1;) precision[i - 1] = std::max(precision[i - 1], precision[i]);

  double sum = 0.0;
  for (int k = 0; k <= 100; ++k) {
    const double r = k / 100.0;
    const auto it = std::lower_bound(recall.begin(), recall.end(), r);
    if (it != recall.end()) sum += precision[static_cast<std::size_t>(it - recall.begin())];
  }
  return sum / 101.0;
}

namespace {

struct Unit {
  std::int64_t image_id;
  std::int64_t category_id;
  std::vector<GroundTruth> gts;
  std::vector<Detection> dets;
  std::vector<double> ious;
};

using GtFilter = std::function<bool(const FovBBox&)>;

std::vector<Unit> build_units(const DatasetFile& gt, std::span<const Detection> dets, const GtFilter& keep,
                              const IoUMethod& method, unsigned threads) {
  std::map<std::pair<std::int64_t, std::int64_t>, Unit> units;
  for (const auto& g : gt.annotations) {
    if (!keep(g.bbox)) continue;
    auto& u = units[{g.category_id, g.image_id}];
    u.gts.push_back(g);
  }
  for (const auto& d : dets) {
    if (!keep(d.bbox)) continue;
    auto& u = units[{d.category_id, d.image_id}];
    u.dets.push_back(d);
  }
  std::vector<Unit> out;
  out.reserve(units.size());
  for (auto& [key, u] : units) {
    u.category_id = key.first;
    u.image_id = key.second;
    out.push_back(std::move(u));
  }
  parallel_for(out.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Unit& u = out[i];
      u.ious.resize(u.gts.size() * u.dets.size());
      for (std::size_t d = 0; d < u.dets.size(); ++d) {
        for (std::size_t g = 0; g < u.gts.size(); ++g) {
          u.ious[d * u.gts.size() + g] = iou(u.gts[g].bbox, u.dets[d].bbox, method);
        }
      }
    }
  });
  return out;
}

struct CategoryAps {
  // Per category id: AP per threshold (nullopt when the category has no GT).
  std::map<std::int64_t, std::vector<std::optional<double>>> per_threshold;
  std::size_t num_gt = 0;
  std::size_t num_det = 0;
};

CategoryAps category_aps(const std::vector<Unit>& units, const std::vector<double>& thresholds) {
  CategoryAps out;
  std::map<std::int64_t, std::size_t> gt_count;
  for (const auto& u : units) {
    gt_count[u.category_id] += u.gts.size();
    out.num_gt += u.gts.size();
    out.num_det += u.dets.size();
  }
  for (const auto& [cat, count] : gt_count) {
    std::vector<std::optional<double>> aps;
    for (double t : thresholds) {
      std::vector<RankedHit> hits;
      for (const auto& u : units) {
        if (u.category_id != cat) continue;
        const Matching m = match_detections(u.gts, u.dets, t, u.ious);
        for (std::size_t d : m.det_order) hits.push_back({u.dets[d].score, m.det_to_gt[d] >= 0});
      }
      aps.push_back(average_precision(std::move(hits), count));
    }
    out.per_threshold[cat] = std::move(aps);
  }
  return out;
}

std::optional<double> mean_over_categories(const CategoryAps& aps, std::size_t threshold_index) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& [cat, v] : aps.per_threshold) {
    if (v[threshold_index]) {
      sum += *v[threshold_index];
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::optional<double> mean_over_thresholds(const std::vector<std::optional<double>>& v) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& x : v) {
    if (x) {
      sum += *x;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

ApSummary summarize(const CategoryAps& aps, std::size_t n_thresholds) {
  ApSummary s;
  s.num_gt = aps.num_gt;
  s.num_det = aps.num_det;
  std::vector<std::optional<double>> per_t;
  for (std::size_t t = 0; t < n_thresholds; ++t) per_t.push_back(mean_over_categories(aps, t));
  s.ap = mean_over_thresholds(per_t);
  s.ap50 = per_t[0];
  s.ap75 = per_t[5];
  return s;
}

}  // namespace

EvalReport evaluate(const DatasetFile& gt, std::span<const Detection> dets, const EvalOptions& options) {
  validate_detections(gt, std::vector<Detection>(dets.begin(), dets.end()));
  const auto thresholds = coco_iou_thresholds();

  EvalReport report;
  report.method = options.method.name();

  const auto run = [&](const GtFilter& keep) {
    return category_aps(build_units(gt, dets, keep, options.method, options.threads), thresholds);
  };

  const CategoryAps all = run([](const FovBBox&) { return true; });
  report.overall = summarize(all, thresholds.size());

  const SizeBuckets& sz = options.sizes;
  report.ap_small = summarize(run([&](const FovBBox& b) { return planar_area(b) < sz.small_max; }), thresholds.size()).ap;
  report.ap_medium = summarize(run([&](const FovBBox& b) {
                                 const double a = planar_area(b);
                                 return a >= sz.small_max && a < sz.medium_max;
                               }),
                               thresholds.size())
                         .ap;
  report.ap_large = summarize(run([&](const FovBBox& b) { return planar_area(b) >= sz.medium_max; }), thresholds.size()).ap;

  for (const LatBand& band : options.bands) {
    report.bands.push_back({band, summarize(run([&](const FovBBox& b) { return band.contains(b.lat()); }), thresholds.size())});
  }

  for (const Category& c : gt.categories) {
    CategoryReport cr;
    cr.category_id = c.id;
    cr.name = c.name;
    const auto it = all.per_threshold.find(c.id);
    if (it != all.per_threshold.end()) {
      cr.summary.ap = mean_over_thresholds(it->second);
      cr.summary.ap50 = it->second[0];
      cr.summary.ap75 = it->second[5];
    }
    for (const auto& g : gt.annotations) cr.summary.num_gt += g.category_id == c.id ? 1 : 0;
    for (const auto& d : dets) cr.summary.num_det += d.category_id == c.id ? 1 : 0;
    report.per_category.push_back(std::move(cr));
  }
  return report;
}

namespace {

std::string fmt_ap(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

}  // namespace

std::string format_report_table(const EvalReport& r) {
  std::ostringstream os;
  char line[256];
  const auto row = [&](const std::string& name, const ApSummary& s) {
    if (s.num_gt == 0) {
      std::snprintf(line, sizeof line, "%-22s %8s %8s %8s %7zu %7zu  no ground truth\n", name.c_str(), "-", "-", "-",
                    s.num_gt, s.num_det);
    } else {
      std::snprintf(line, sizeof line, "%-22s %8s %8s %8s %7zu %7zu\n", name.c_str(), fmt_ap(s.ap).c_str(),
                    fmt_ap(s.ap50).c_str(), fmt_ap(s.ap75).c_str(), s.num_gt, s.num_det);
    }
    os << line;
  };
  os << "IoU method: " << r.method << "\n";
  std::snprintf(line, sizeof line, "%-22s %8s %8s %8s %7s %7s\n", "subset", "AP", "AP50", "AP75", "#gt", "#det");
  os << line;
  row("all", r.overall);
  for (const auto& b : r.bands) row("|lat| " + b.band.label(), b.summary);
  std::snprintf(line, sizeof line, "%-22s %8s %8s %8s\n", "size", "AP_s", "AP_m", "AP_l");
  os << line;
  std::snprintf(line, sizeof line, "%-22s %8s %8s %8s\n", "", fmt_ap(r.ap_small).c_str(), fmt_ap(r.ap_medium).c_str(),
                fmt_ap(r.ap_large).c_str());
  os << line;
  for (const auto& c : r.per_category) row("cat " + std::to_string(c.category_id) + " " + c.name, c.summary);
  return os.str();
}

}  // namespace sphergeo
