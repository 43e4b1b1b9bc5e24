// SPDX-License-Identifier: Apache-2.0
//
// Coordinate systems on the unit sphere: angular <-> Cartesian conversion,
// the yaw/pitch rotations used for augmentation, great-circle distance and
// the equirectangular (ERP) projection.
//
// Conventions
//   * Angles are degrees at every public boundary; trig is done in radians.
//   * Cartesian axes: y is the polar axis, z points at (lon 0, lat 0) and x
//     at (lon 90, lat 0), i.e. (x, y, z) = (sin lon cos lat, sin lat,
//     cos lon cos lat).
//   * rotate_yaw(v, t) rotates about y and maps longitude L to L - t.
//   * rotate_pitch(v, p) rotates about x and maps (0, lat) to (0, lat + p).
#pragma once

#include <cmath>
#include <numbers>
#include <utility>

namespace sphergeo {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kDegToRad = kPi / 180.0;
inline constexpr double kRadToDeg = 180.0 / kPi;

constexpr double deg_to_rad(double deg) { return deg * kDegToRad; }
constexpr double rad_to_deg(double rad) { return rad * kRadToDeg; }

/// Wraps a longitude (or longitude difference) into [-180, 180).
double wrap_lon(double deg);

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  friend constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }
  constexpr bool operator==(const Vec3&) const = default;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

/// Throws std::invalid_argument for a zero (or non-finite) vector.
Vec3 normalized(const Vec3& v);

/// A point on the unit sphere. Longitude is normalized into [-180, 180) on
/// construction; latitude outside [-90, 90] is rejected.
class SphPoint {
 public:
  SphPoint() = default;
  SphPoint(double lon_deg, double lat_deg);

  double lon() const { return lon_; }
  double lat() const { return lat_; }

  bool operator==(const SphPoint&) const = default;

 private:
  double lon_ = 0.0;
  double lat_ = 0.0;
};

/// Equirectangular projection parameters. The radius is fixed at 1.
struct ErpProjection {
  SphPoint center{};
  double standard_parallel = 0.0;
  double radius = 1.0;
};

/// Forward transform is yaw first, then pitch.
struct RotationSpec {
  double yaw = 0.0;
  double pitch = 0.0;

  bool operator==(const RotationSpec&) const = default;
};

Vec3 sph_to_cart(const SphPoint& p);

/// Inverse of sph_to_cart for any non-zero vector. Returns lon = 0 at the
/// poles. Throws std::invalid_argument for a zero vector.
SphPoint cart_to_sph(const Vec3& v);

Vec3 rotate_yaw(const Vec3& v, double yaw_deg);
Vec3 rotate_pitch(const Vec3& v, double pitch_deg);

/// pitch(yaw(v)).
Vec3 rotate_forward(const Vec3& v, const RotationSpec& spec);
/// yaw^-1(pitch^-1(v)); exact inverse of rotate_forward.
Vec3 rotate_inverse(const Vec3& v, const RotationSpec& spec);

/// Haversine great-circle distance in radians, in [0, pi].
double great_circle_distance(const SphPoint& p, const SphPoint& q);

/// Planar ERP coordinates (radians scaled by the projection radius).
std::pair<double, double> erp_project(const SphPoint& p, const ErpProjection& proj);

struct PixelCoord {
  double u = 0.0;
  double v = 0.0;
};

/// Pixel (u, v) of a width x height ERP raster, sampled at the pixel center.
/// Requires width == 2 * height.
SphPoint erp_pixel_to_sph(double u, double v, int width, int height);

/// Continuous pixel index of a sphere point; pixel centers land on integers.
PixelCoord sph_to_erp_pixel(const SphPoint& p, int width, int height);

/// Throws std::invalid_argument unless width == 2 * height > 0.
void require_erp_dims(int width, int height);

}  // namespace sphergeo
