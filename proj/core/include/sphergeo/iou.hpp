// SPDX-License-Identifier: Apache-2.0
//
// IoU between two FoV boxes, four ways:
//   fov_iou    rectangle approximation using the FoV distance (longitude
//              difference scaled by the cosine of the mean latitude)
//   sph_iou    rectangle approximation after moving both boxes to the equator
//   exact_iou  spherical-polygon clipping of the two tangent rectangles
//   mc_iou     Monte-Carlo membership counting; the oracle for exact_iou
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sphergeo/bfov.hpp"

namespace sphergeo {

/// Sample count used by exact_iou when a clip is numerically degenerate.
inline constexpr std::size_t kExactFallbackSamples = 1'000'000;
inline constexpr std::uint64_t kExactFallbackSeed = 0x5eed;
/// Plane-side classification tolerance of the polygon clipper.
inline constexpr double kClipEps = 1e-9;

enum class SphAreaModel {
  kPlanar,   // fov_h * fov_v
  kSegment,  // 2 fov_h sin(fov_v / 2)
};

struct IoUMethod {
  enum class Kind { kFov, kSph, kExact, kMonteCarlo };

  Kind kind = Kind::kFov;
  std::size_t samples = 1'000'000;
  std::uint64_t seed = 0;

  static IoUMethod fov() { return {Kind::kFov}; }
  static IoUMethod sph() { return {Kind::kSph}; }
  static IoUMethod exact() { return {Kind::kExact}; }
  /// Throws std::invalid_argument for fewer than 1000 samples.
  static IoUMethod monte_carlo(std::size_t samples, std::uint64_t seed);

  /// Parses "fov", "sph", "exact" or "mc".
  static IoUMethod parse(const std::string& name);
  std::string name() const;
};

struct McEstimate {
  double iou = 0.0;
  double std_error = 0.0;
  std::size_t union_hits = 0;
  std::size_t intersection_hits = 0;
};

class IoUMatrix {
 public:
  IoUMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double at(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
  double& at(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }
  std::span<const double> values() const { return values_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> values_;
};

/// Degrees; (theta_d - theta_g) wrapped to [-180, 180) times cos of the mean latitude.
double fov_distance(const FovBBox& bg, const FovBBox& bd);

double fov_iou(const FovBBox& bg, const FovBBox& bd);
double sph_iou(const FovBBox& bg, const FovBBox& bd, SphAreaModel area = SphAreaModel::kPlanar);
double exact_iou(const FovBBox& bg, const FovBBox& bd);
McEstimate mc_iou(const FovBBox& bg, const FovBBox& bd, std::size_t samples, std::uint64_t seed);

/// Sum of interior angles minus (n - 2) pi for a simple counter-clockwise
/// polygon with great-circle edges. Throws std::invalid_argument for fewer
/// than 3 vertices or consecutive duplicates.
double spherical_polygon_area(std::span<const Vec3> vertices);

/// Intersection polygon of two boxes (empty when they do not overlap).
/// Throws DegenerateClipError when every vertex sits on a clip plane.
std::vector<Vec3> intersection_polygon(const FovBBox& a, const FovBBox& b);

struct DegenerateClipError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double iou(const FovBBox& a, const FovBBox& b, const IoUMethod& method);

/// Entry (i, j) is bit-identical to iou(a[i], b[j], method) for any thread
/// count; threads == 0 picks the hardware concurrency.
IoUMatrix iou_matrix(std::span<const FovBBox> a, std::span<const FovBBox> b, const IoUMethod& method,
                     unsigned threads = 0);

}  // namespace sphergeo
