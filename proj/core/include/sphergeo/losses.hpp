// SPDX-License-Identifier: Apache-2.0
//
// GIoU-style regression losses on FoV boxes:
//   loss = 1 - IoU + (A(C) - A(U)) / A(C)
// where C is the smallest enclosing rectangle in the same approximation
// (FoV distance for fov_giou_loss, equator shift for sph_giou_loss) and all
// areas are planar degree^2.
//
// Gradients are taken with respect to the detected box (lon, lat, fov_h,
// fov_v), in units of loss per degree. At a min/max tie the branch of the
// ground-truth argument is used; the max(0, .) clamp on intersection extents
// contributes zero gradient on the clamped side.
#pragma once

#include <array>

#include "sphergeo/bfov.hpp"

namespace sphergeo {

enum class LossKind { kFovGIoU, kSphGIoU };

struct LossValue {
  double value = 0.0;
  double iou_term = 0.0;
  double enclosure_penalty = 0.0;
};

struct LossGradient {
  /// d loss / d (lon, lat, fov_h, fov_v) of the detected box.
  std::array<double, 4> d_detected{};
  LossValue loss;
  /// Evaluation hit an exact tie in a min/max/clamp; the gradient is the
  /// one-sided derivative selected by the tie-breaking rule.
  bool at_kink = false;
  /// Smallest distance (degrees or degree-scale units) from any min/max/clamp
  /// switching point; finite differences with step h are valid when h < margin.
  double kink_margin = 0.0;
};

LossValue fov_giou_loss(const FovBBox& bg, const FovBBox& bd);
LossValue sph_giou_loss(const FovBBox& bg, const FovBBox& bd);
LossValue giou_loss(const FovBBox& bg, const FovBBox& bd, LossKind kind);

LossGradient loss_gradient(const FovBBox& bg, const FovBBox& bd, LossKind kind);

}  // namespace sphergeo
