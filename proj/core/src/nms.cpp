// SPDX-License-Identifier: Apache-2.0
#include "sphergeo/nms.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

namespace sphergeo {

void validate_score(double score) {
  if (!(score >= 0.0 && score <= 1.0)) {
    throw std::invalid_argument("detection score " + std::to_string(score) + " outside [0, 1]");
  }
}

namespace {

void validate_threshold(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("NMS threshold must lie in [0, 1]");
}

}  // namespace

std::vector<std::size_t> nms_indices(std::span<const Detection> dets, double iou_threshold,
                                     const IoUMethod& method) {
  validate_threshold(iou_threshold);
  for (const auto& d : dets) validate_score(d.score);
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].score > dets[b].score; });

  std::vector<bool> suppressed(dets.size(), false);
  std::vector<std::size_t> kept;
  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    const std::size_t i = order[oi];
    if (suppressed[i]) continue;
    kept.push_back(i);
    for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
      const std::size_t j = order[oj];
      if (suppressed[j] || dets[j].category_id != dets[i].category_id) continue;
      if (iou(dets[i].bbox, dets[j].bbox, method) > iou_threshold) suppressed[j] = true;
    }
  }
  return kept;
}

std::vector<Detection> nms(std::span<const Detection> dets, double iou_threshold, const IoUMethod& method) {
  std::vector<Detection> out;
  for (std::size_t i : nms_indices(dets, iou_threshold, method)) out.push_back(dets[i]);
  return out;
}

std::vector<Detection> nms_per_image(std::span<const Detection> dets, double iou_threshold,
                                     const IoUMethod& method) {
  validate_threshold(iou_threshold);
  std::map<std::int64_t, std::vector<Detection>> by_image;
  for (const auto& d : dets) by_image[d.image_id].push_back(d);
  std::vector<Detection> out;
  for (const auto& [image_id, group] : by_image) {
    auto kept = nms(group, iou_threshold, method);
    out.insert(out.end(), kept.begin(), kept.end());
  }
  return out;
}

}  // namespace sphergeo
