// SPDX-License-Identifier: Apache-2.0
#include "sphergeo/losses.hpp"

#include <algorithm>

#include "rect_terms.hpp"

namespace sphergeo {

namespace {

detail::CenterModel center_model(LossKind kind) {
  return kind == LossKind::kFovGIoU ? detail::CenterModel::kFovDistance : detail::CenterModel::kEquator;
}

// Rounding can leave enclose - uni a few ulps below zero; only the value is clamped.
inline double floor_zero(double x) { return std::max(x, 0.0); }
inline detail::Dual floor_zero(detail::Dual x) {
  x.v = std::max(x.v, 0.0);
  return x;
}

template <class T>
struct LossT {
  T value, iou, penalty;
};

template <class T>
LossT<T> evaluate_loss(const detail::BoxT<T>& g, const detail::BoxT<T>& d, LossKind kind,
                       detail::KinkTracker* k) {
  const auto t = detail::rect_terms(g, d, center_model(kind), true, k);
  LossT<T> out;
  out.iou = t.inter / t.uni;
  out.penalty = floor_zero(t.enclose - t.uni) / t.enclose;
  out.value = T(1.0) - out.iou + out.penalty;
  return out;
}

}  // namespace

LossValue giou_loss(const FovBBox& bg, const FovBBox& bd, LossKind kind) {
  const detail::BoxT<double> g{bg.lon(), bg.lat(), bg.fov_h(), bg.fov_v()};
  const detail::BoxT<double> d{bd.lon(), bd.lat(), bd.fov_h(), bd.fov_v()};
  const auto l = evaluate_loss(g, d, kind, nullptr);
  return {l.value, l.iou, l.penalty};
}

LossValue fov_giou_loss(const FovBBox& bg, const FovBBox& bd) { return giou_loss(bg, bd, LossKind::kFovGIoU); }

LossValue sph_giou_loss(const FovBBox& bg, const FovBBox& bd) { return giou_loss(bg, bd, LossKind::kSphGIoU); }

LossGradient loss_gradient(const FovBBox& bg, const FovBBox& bd, LossKind kind) {
  using detail::Dual;
  const detail::BoxT<Dual> g{bg.lon(), bg.lat(), bg.fov_h(), bg.fov_v()};
  const detail::BoxT<Dual> d{Dual(bd.lon(), 0), Dual(bd.lat(), 1), Dual(bd.fov_h(), 2), Dual(bd.fov_v(), 3)};
  detail::KinkTracker kinks;
  const auto l = evaluate_loss(g, d, kind, &kinks);

  LossGradient out;
  out.d_detected = l.value.d;
  out.loss = {l.value.v, l.iou.v, l.penalty.v};
  out.at_kink = kinks.tie;
  out.kink_margin = kinks.margin;
  return out;
}

}  // namespace sphergeo
