// SPDX-License-Identifier: Apache-2.0
//
// Field-of-View bounding boxes. A box (lon, lat, fov_h, fov_v) is realized on
// the sphere as the perspective (tangent-plane) rectangle centered on
// (lon, lat): in the box frame, where the center sits at (0, 0, 1), a point
// is inside iff z > 0, |x / z| <= tan(fov_h / 2) and |y / z| <= tan(fov_v / 2).
// Every edge is a great-circle arc.
#pragma once

#include <array>

#include "sphergeo/sphere.hpp"

namespace sphergeo {

class FovBBox {
 public:
  FovBBox() = default;
  /// Throws std::invalid_argument unless 0 < fov < 180 and lat in [-90, 90].
  FovBBox(double lon, double lat, double fov_h, double fov_v);

  double lon() const { return lon_; }
  double lat() const { return lat_; }
  double fov_h() const { return fov_h_; }
  double fov_v() const { return fov_v_; }

  SphPoint center() const { return SphPoint(lon_, lat_); }

  /// True iff the vertical extent reaches past a pole.
  bool pole_adjacent() const;

  bool operator==(const FovBBox&) const = default;

 private:
  double lon_ = 0.0;
  double lat_ = 0.0;
  double fov_h_ = 1.0;
  double fov_v_ = 1.0;
};

/// Orthonormal world <-> box-frame transform.
class BoxFrame {
 public:
  explicit BoxFrame(const FovBBox& box);

  Vec3 to_frame(const Vec3& world) const;
  Vec3 to_world(const Vec3& frame) const;

 private:
  // Rows of the world -> frame rotation.
  Vec3 r0_, r1_, r2_;
};

inline BoxFrame box_frame(const FovBBox& b) { return BoxFrame(b); }

/// Tolerance applied to the boundary comparisons in contains().
inline constexpr double kContainsEps = 1e-12;

bool contains(const FovBBox& b, const SphPoint& p);
bool contains(const FovBBox& b, const Vec3& unit_point);

/// Corners counter-clockwise seen from outside the sphere.
std::array<Vec3, 4> box_corners(const FovBBox& b);

/// Inward normals of the four great-circle edges, in world coordinates.
/// A unit point is inside the box iff dot(n, p) >= 0 for all four.
std::array<Vec3, 4> edge_normals(const FovBBox& b);

/// fov_h * fov_v, degree^2.
double planar_area(const FovBBox& b);
/// 2 * fov_h * sin(fov_v / 2) with fov_h in radians (spherical-segment area).
double segment_area(const FovBBox& b);
/// Exact area of the tangent rectangle, 4 asin(sin(fov_h/2) sin(fov_v/2)).
double solid_angle(const FovBBox& b);

}  // namespace sphergeo
