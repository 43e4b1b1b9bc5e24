// SPDX-License-Identifier: Apache-2.0
#include "sphergeo/sphere.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace sphergeo {

double wrap_lon(double deg) {
  if (deg >= -180.0 && deg < 180.0) return deg;
  double w = std::fmod(deg + 180.0, 360.0);
  if (w < 0.0) w += 360.0;
  w -= 180.0;
  // fmod can round a tiny negative input up to exactly 180.
  return w >= 180.0 ? w - 360.0 : w;
}

Vec3 normalized(const Vec3& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw std::invalid_argument("cannot normalize a zero or non-finite vector");
  }
  return v * (1.0 / n);
}

SphPoint::SphPoint(double lon_deg, double lat_deg) {
  if (!std::isfinite(lon_deg) || !std::isfinite(lat_deg)) {
    throw std::invalid_argument("sphere point coordinates must be finite");
  }
  if (lat_deg < -90.0 || lat_deg > 90.0) {
    throw std::invalid_argument("latitude " + std::to_string(lat_deg) + " outside [-90, 90]");
  }
  lon_ = wrap_lon(lon_deg);
  lat_ = lat_deg;
}

Vec3 sph_to_cart(const SphPoint& p) {
  const double lon = deg_to_rad(p.lon());
  const double lat = deg_to_rad(p.lat());
  const double cl = std::cos(lat);
  return {std::sin(lon) * cl, std::sin(lat), std::cos(lon) * cl};
}

SphPoint cart_to_sph(const Vec3& v) {
  const Vec3 u = normalized(v);
  const double horiz = std::hypot(u.x, u.z);
  const double lat = rad_to_deg(std::atan2(u.y, horiz));
  const double lon = horiz == 0.0 ? 0.0 : rad_to_deg(std::atan2(u.x, u.z));
  return SphPoint(lon, std::clamp(lat, -90.0, 90.0));
}

Vec3 rotate_yaw(const Vec3& v, double yaw_deg) {
  const double t = deg_to_rad(yaw_deg);
  const double c = std::cos(t);
  const double s = std::sin(t);
  return {v.x * c - v.z * s, v.y, v.x * s + v.z * c};
}

Vec3 rotate_pitch(const Vec3& v, double pitch_deg) {
  const double t = deg_to_rad(pitch_deg);
  const double c = std::cos(t);
  const double s = std::sin(t);
  return {v.x, v.y * c + v.z * s, -v.y * s + v.z * c};
}

Vec3 rotate_forward(const Vec3& v, const RotationSpec& spec) {
  return rotate_pitch(rotate_yaw(v, spec.yaw), spec.pitch);
}

Vec3 rotate_inverse(const Vec3& v, const RotationSpec& spec) {
  return rotate_yaw(rotate_pitch(v, -spec.pitch), -spec.yaw);
}

double great_circle_distance(const SphPoint& p, const SphPoint& q) {
  const double lat1 = deg_to_rad(p.lat());
  const double lat2 = deg_to_rad(q.lat());
  const double dlat = lat2 - lat1;
  const double dlon = deg_to_rad(wrap_lon(q.lon() - p.lon()));
  const double s_lat = std::sin(dlat / 2.0);
  const double s_lon = std::sin(dlon / 2.0);
  const double h = s_lat * s_lat + std::cos(lat1) * std::cos(lat2) * s_lon * s_lon;
  // Haversine to the antipode of q gives 1 - h without cancellation.
  const double s_sum = std::sin((lat1 + lat2) / 2.0);
  const double c_lon = std::cos(dlon / 2.0);
  const double hc = s_sum * s_sum + std::cos(lat1) * std::cos(lat2) * c_lon * c_lon;
  return 2.0 * std::atan2(std::sqrt(std::clamp(h, 0.0, 1.0)), std::sqrt(std::clamp(hc, 0.0, 1.0)));
}

std::pair<double, double> erp_project(const SphPoint& p, const ErpProjection& proj) {
  const double dlon = deg_to_rad(wrap_lon(p.lon() - proj.center.lon()));
  const double dlat = deg_to_rad(p.lat() - proj.center.lat());
  return {proj.radius * dlon * std::cos(deg_to_rad(proj.standard_parallel)), proj.radius * dlat};
}

void require_erp_dims(int width, int height) {
  if (height <= 0 || width != 2 * height) {
    throw std::invalid_argument("equirectangular raster must be 2:1, got " + std::to_string(width) +
                                "x" + std::to_string(height));
  }
}

SphPoint erp_pixel_to_sph(double u, double v, int width, int height) {
  require_erp_dims(width, height);
  const double lon = (u + 0.5) / width * 360.0 - 180.0;
  const double lat = 90.0 - (v + 0.5) / height * 180.0;
  return SphPoint(lon, std::clamp(lat, -90.0, 90.0));
}

PixelCoord sph_to_erp_pixel(const SphPoint& p, int width, int height) {
  require_erp_dims(width, height);
  return {(p.lon() + 180.0) / 360.0 * width - 0.5, (90.0 - p.lat()) / 180.0 * height - 0.5};
}

}  // namespace sphergeo
