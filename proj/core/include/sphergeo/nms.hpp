// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "sphergeo/detection.hpp"
#include "sphergeo/iou.hpp"

namespace sphergeo {

/// Greedy per-category non-maximum suppression for the detections of one
/// image. Detections are visited by descending score (equal scores keep input
/// order); a detection is suppressed when IoU(kept, d) > iou_threshold
/// strictly. Output holds the kept detections unmodified, by descending score.
/// Throws std::invalid_argument for a threshold outside [0, 1].
std::vector<Detection> nms(std::span<const Detection> dets, double iou_threshold,
                           const IoUMethod& method = IoUMethod::fov());

/// Same rule, returning indices into dets.
std::vector<std::size_t> nms_indices(std::span<const Detection> dets, double iou_threshold,
                                     const IoUMethod& method = IoUMethod::fov());

/// Applies nms() independently to every image_id; output grouped by ascending
/// image id.
std::vector<Detection> nms_per_image(std::span<const Detection> dets, double iou_threshold,
                                     const IoUMethod& method = IoUMethod::fov());

}  // namespace sphergeo
