// SPDX-License-Identifier: Apache-2.0
//
// COCO-style detection metrics over FoV boxes: greedy score-ordered matching,
// 101-point interpolated AP, averaging over IoU thresholds 0.50:0.05:0.95 and
// over categories that have ground truth.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sphergeo/dataset.hpp"
#include "sphergeo/iou.hpp"

namespace sphergeo {

/// Absolute center-latitude band [lo, hi] in degrees.
struct LatBand {
  double lo = 50.0;
  double hi = 90.0;

  bool contains(double lat) const;
  std::string label() const;
  /// Parses "LO:HI". Throws std::invalid_argument.
  static LatBand parse(const std::string& text);
};

/// Planar FoV-area thresholds (degree^2): small < small_max <= medium <
/// medium_max <= large.
struct SizeBuckets {
  double small_max = 36.0;
  double medium_max = 324.0;
};

struct EvalOptions {
  IoUMethod method = IoUMethod::fov();
  std::vector<LatBand> bands{LatBand{}};
  SizeBuckets sizes{};
  unsigned threads = 0;
};

/// 0.50, 0.55, ..., 0.95.
std::vector<double> coco_iou_thresholds();

struct Matching {
  /// Detection indices (into the input span) by descending score, stable.
  std::vector<std::size_t> det_order;
  /// Per detection (input index): matched GT index or -1.
  std::vector<std::int64_t> det_to_gt;
  /// Per GT (input index): matched detection index or -1.
  std::vector<std::int64_t> gt_to_det;
};

/// Greedy one-to-one matching of one (image, category) unit. Each detection,
/// by descending score, takes the unmatched GT with highest IoU >= threshold;
/// exact IoU ties go to the lower GT id.
Matching match_detections(std::span<const GroundTruth> gts, std::span<const Detection> dets, double iou_threshold,
                          const IoUMethod& method);

/// As above with a precomputed ious[d * gts.size() + g] table.
Matching match_detections(std::span<const GroundTruth> gts, std::span<const Detection> dets, double iou_threshold,
                          std::span<const double> ious);

struct RankedHit {
  double score = 0.0;
  bool true_positive = false;
};

/// 101-point interpolated AP. Hits are ranked by descending score (stable).
/// nullopt when num_gt == 0.
std::optional<double> average_precision(std::vector<RankedHit> hits, std::size_t num_gt);

struct ApSummary {
  std::optional<double> ap;
  std::optional<double> ap50;
  std::optional<double> ap75;
  std::size_t num_gt = 0;
  std::size_t num_det = 0;
};

struct BandReport {
  LatBand band;
  ApSummary summary;
};

struct CategoryReport {
  std::int64_t category_id = 0;
  std::string name;
  ApSummary summary;
};

struct EvalReport {
  std::string method;
  ApSummary overall;
  std::optional<double> ap_small;
  std::optional<double> ap_medium;
  std::optional<double> ap_large;
  std::vector<BandReport> bands;
  std::vector<CategoryReport> per_category;
};

/// Throws ValidationError when a detection references an unknown image or
/// category. Band and size subsets filter both GTs and detections before
/// matching.
EvalReport evaluate(const DatasetFile& gt, std::span<const Detection> dets, const EvalOptions& options = {});

/// Aligned plain-text table.
std::string format_report_table(const EvalReport& report);

}  // namespace sphergeo
