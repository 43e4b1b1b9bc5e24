// SPDX-License-Identifier: Apache-2.0
#include "sphergeo/bfov.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sphergeo {

FovBBox::FovBBox(double lon, double lat, double fov_h, double fov_v) {
  if (!std::isfinite(lon) || !std::isfinite(lat) || !std::isfinite(fov_h) || !std::isfinite(fov_v)) {
    throw std::invalid_argument("box fields must be finite");
  }
  if (lat < -90.0 || lat > 90.0) {
    throw std::invalid_argument("box latitude " + std::to_string(lat) + " outside [-90, 90]");
  }
  if (!(fov_h > 0.0 && fov_h < 180.0) || !(fov_v > 0.0 && fov_v < 180.0)) {
    throw std::invalid_argument("box FoVs must lie in (0, 180), got " + std::to_string(fov_h) +
                                ", " + std::to_string(fov_v));
  }
  lon_ = wrap_lon(lon);
  lat_ = lat;
  fov_h_ = fov_h;
  fov_v_ = fov_v;
}

bool FovBBox::pole_adjacent() const { return std::abs(lat_) + fov_v_ / 2.0 > 90.0; }

BoxFrame::BoxFrame(const FovBBox& box) {
  // world -> frame = pitch(-lat) o yaw(lon); yaw(t) maps lon L to L - t.
  // Build the matrix by transforming the basis vectors.
  const auto apply = [&](const Vec3& v) { return rotate_pitch(rotate_yaw(v, box.lon()), -box.lat()); };
  const Vec3 c0 = apply({1, 0, 0});
  const Vec3 c1 = apply({0, 1, 0});
  const Vec3 c2 = apply({0, 0, 1});
  r0_ = {c0.x, c1.x, c2.x};
  r1_ = {c0.y, c1.y, c2.y};
  r2_ = {c0.z, c1.z, c2.z};
}

Vec3 BoxFrame::to_frame(const Vec3& w) const { return {dot(r0_, w), dot(r1_, w), dot(r2_, w)}; }

Vec3 BoxFrame::to_world(const Vec3& f) const { return r0_ * f.x + r1_ * f.y + r2_ * f.z; }

bool contains(const FovBBox& b, const Vec3& p) {
  const Vec3 f = BoxFrame(b).to_frame(p);
  if (!(f.z > 0.0)) return false;
  const double th = std::tan(deg_to_rad(b.fov_h() / 2.0));
  const double tv = std::tan(deg_to_rad(b.fov_v() / 2.0));
  return std::abs(f.x) <= th * f.z + kContainsEps && std::abs(f.y) <= tv * f.z + kContainsEps;
}

bool contains(const FovBBox& b, const SphPoint& p) { return contains(b, sph_to_cart(p)); }

std::array<Vec3, 4> box_corners(const FovBBox& b) {
  const BoxFrame frame(b);
  const double th = std::tan(deg_to_rad(b.fov_h() / 2.0));
  const double tv = std::tan(deg_to_rad(b.fov_v() / 2.0));
  // Viewed from outside along -z with +y up, +x points right.
  return {
      frame.to_world(normalized({th, -tv, 1.0})),
      frame.to_world(normalized({th, tv, 1.0})),
      frame.to_world(normalized({-th, tv, 1.0})),
      frame.to_world(normalized({-th, -tv, 1.0})),
  };
}

std::array<Vec3, 4> edge_normals(const FovBBox& b) {
  const BoxFrame frame(b);
  const double th = std::tan(deg_to_rad(b.fov_h() / 2.0));
  const double tv = std::tan(deg_to_rad(b.fov_v() / 2.0));
  return {
      frame.to_world(normalized({-1.0, 0.0, th})),
      frame.to_world(normalized({0.0, -1.0, tv})),
      frame.to_world(normalized({1.0, 0.0, th})),
      frame.to_world(normalized({0.0, 1.0, tv})),
  };
}

double planar_area(const FovBBox& b) { return b.fov_h() * b.fov_v(); }

double segment_area(const FovBBox& b) {
  return 2.0 * deg_to_rad(b.fov_h()) * std::sin(deg_to_rad(b.fov_v()) / 2.0);
}

double solid_angle(const FovBBox& b) {
  return 4.0 * std::asin(std::sin(deg_to_rad(b.fov_h()) / 2.0) * std::sin(deg_to_rad(b.fov_v()) / 2.0));
}

}  // namespace sphergeo
