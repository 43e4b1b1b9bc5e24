// SPDX-License-Identifier: Apache-2.0
//
// Rectangle-approximation terms shared by fov_iou / sph_iou and the GIoU-style
// losses. Templated on the scalar so the same code runs on double and on the
// forward-mode Dual used for gradients.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <type_traits>

#include "sphergeo/sphere.hpp"

namespace sphergeo::detail {

/// Forward-mode dual number carrying derivatives w.r.t. four inputs.
struct Dual {
  double v = 0.0;
  std::array<double, 4> d{};

  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT: constants promote implicitly
  Dual(double value, int seed_index) : v(value) { d[static_cast<std::size_t>(seed_index)] = 1.0; }

  friend Dual operator+(const Dual& a, const Dual& b) {
    Dual r(a.v + b.v);
    for (std::size_t i = 0; i < 4; ++i) r.d[i] = a.d[i] + b.d[i];
    return r;
  }
  friend Dual operator-(const Dual& a, const Dual& b) {
    Dual r(a.v - b.v);
    for (std::size_t i = 0; i < 4; ++i) r.d[i] = a.d[i] - b.d[i];
    return r;
  }
  friend Dual operator-(const Dual& a) {
    Dual r(-a.v);
    for (std::size_t i = 0; i < 4; ++i) r.d[i] = -a.d[i];
    return r;
  }
  friend Dual operator*(const Dual& a, const Dual& b) {
    Dual r(a.v * b.v);
    for (std::size_t i = 0; i < 4; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
    return r;
  }
  friend Dual operator/(const Dual& a, const Dual& b) {
    Dual r(a.v / b.v);
    const double inv2 = 1.0 / (b.v * b.v);
    for (std::size_t i = 0; i < 4; ++i) r.d[i] = (a.d[i] * b.v - a.v * b.d[i]) * inv2;
    return r;
  }
};

inline double value_of(double x) { return x; }
inline double value_of(const Dual& x) { return x.v; }

inline double cos_deg(double x) { return std::cos(deg_to_rad(x)); }
inline Dual cos_deg(const Dual& x) {
  Dual r(std::cos(deg_to_rad(x.v)));
  const double k = -std::sin(deg_to_rad(x.v)) * kDegToRad;
  for (std::size_t i = 0; i < 4; ++i) r.d[i] = k * x.d[i];
  return r;
}

inline double sin_deg(double x) { return std::sin(deg_to_rad(x)); }
inline Dual sin_deg(const Dual& x) {
  Dual r(std::sin(deg_to_rad(x.v)));
  const double k = std::cos(deg_to_rad(x.v)) * kDegToRad;
  for (std::size_t i = 0; i < 4; ++i) r.d[i] = k * x.d[i];
  return r;
}

/// Records how close an evaluation came to a non-differentiable point.
struct KinkTracker {
  double margin = std::numeric_limits<double>::infinity();
  bool tie = false;

  void note(double gap) {
    gap = std::abs(gap);
    margin = std::min(margin, gap);
    if (gap == 0.0) tie = true;
  }
};

// Ties resolve to the first (ground-truth) argument.
template <class T>
T min_first(const T& a, const T& b, KinkTracker* k) {
  if (k) k->note(value_of(a) - value_of(b));
  return value_of(b) < value_of(a) ? b : a;
}

template <class T>
T max_first(const T& a, const T& b, KinkTracker* k) {
  if (k) k->note(value_of(a) - value_of(b));
  return value_of(b) > value_of(a) ? b : a;
}

/// max(0, x); the clamped side (including x == 0) has zero gradient.
template <class T>
T clamp0(const T& x, KinkTracker* k) {
  if (k) k->note(value_of(x));
  return value_of(x) > 0.0 ? x : T(0.0);
}

/// Longitude-difference wrap to [-180, 180); derivative passes through.
template <class T>
T wrap_diff(const T& raw, KinkTracker* k) {
  const double w = wrap_lon(value_of(raw));
  if (k) k->note(180.0 - std::abs(w));
  if constexpr (std::is_same_v<T, double>) {
    return w;
  } else {
    T r = raw;
    r.v = w;
    return r;
  }
}

template <class T>
struct BoxT {
  T lon, lat, fov_h, fov_v;
};

template <class T>
struct RectTerms {
  T area_g, area_d, inter, uni, enclose;
};

enum class CenterModel { kFovDistance, kEquator };

/// Intersection, union and (optionally) enclosing-box areas in degree^2.
template <class T>
RectTerms<T> rect_terms(const BoxT<T>& g, const BoxT<T>& d, CenterModel model, bool with_enclosure,
                        KinkTracker* k) {
  const T half(0.5);
  const T dlon = wrap_diff(d.lon - g.lon, k);

  // Coordinates relative to the ground-truth center.
  T d_center;
  if (model == CenterModel::kFovDistance) {
    d_center = dlon * cos_deg((g.lat + d.lat) * half);
  } else {
    d_center = dlon;
  }
  const T g_left = -(g.fov_h * half);
  const T g_right = g.fov_h * half;
  const T d_left = d_center - d.fov_h * half;
  const T d_right = d_center + d.fov_h * half;
  const T dlat = d.lat - g.lat;
  const T g_bottom = -(g.fov_v * half);
  const T g_top = g.fov_v * half;
  const T d_bottom = dlat - d.fov_v * half;
  const T d_top = dlat + d.fov_v * half;

  RectTerms<T> r;
  r.area_g = g.fov_h * g.fov_v;
  r.area_d = d.fov_h * d.fov_v;
  const T iw = clamp0(min_first(g_right, d_right, k) - max_first(g_left, d_left, k), k);
  const T ih = clamp0(min_first(g_top, d_top, k) - max_first(g_bottom, d_bottom, k), k);
  r.inter = iw * ih;
  r.uni = r.area_g + r.area_d - r.inter;
  if (with_enclosure) {
    const T cw = max_first(g_right, d_right, k) - min_first(g_left, d_left, k);
    const T ch = max_first(g_top, d_top, k) - min_first(g_bottom, d_bottom, k);
    r.enclose = cw * ch;
  } else {
    r.enclose = T(0.0);
  }
  return r;
}

}  // namespace sphergeo::detail
