// SPDX-License-Identifier: Apache-2.0
//
// Spherically consistent augmentation of ERP images: a random yaw
// translation plus a bounded pitch rotation, applied to the pixels and to
// the FoV boxes (boxes are re-centred and resized to the tightest parallel
// box around the rolled rectangle).
#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "sphergeo/bfov.hpp"
#include "sphergeo/dataset.hpp"
#include "sphergeo/image.hpp"

namespace sphergeo {

/// Boxes whose rotated center lands this close to a pole are dropped.
inline constexpr double kPoleDropDeg = 0.5;

struct AugmentConfig {
  double yaw_min = 0.0;
  double yaw_max = 360.0;
  double pitch_min = -30.0;
  double pitch_max = 30.0;
  double fraction = 0.5;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on an empty or out-of-range interval.
  void validate() const;
};

struct RollAngle {
  double delta = 0.0;  // degrees, positive toward local north
};

/// Inverse-mapping resample with bilinear interpolation, horizontal
/// wraparound and vertical clamping. Same dimensions as the input.
ErpImage remap_erp(const ErpImage& img, const RotationSpec& spec, unsigned threads = 1);

/// Angle from east(R c) to R east(c) in the tangent plane at R c.
/// Throws std::domain_error when R c is at a pole.
RollAngle local_roll_angle(const SphPoint& center, const RotationSpec& spec);

/// Rotated center; fov_h' = a|cos d| + b|sin d|, fov_v' = a|sin d| + b|cos d|,
/// clamped below 180. Throws std::domain_error when the center lands on a pole.
FovBBox transform_bbox(const FovBBox& b, const RotationSpec& spec);

struct AugmentedImage {
  std::int64_t source_id = 0;
  RotationSpec spec;
  ImageInfo info;
};

struct DroppedBox {
  std::int64_t annotation_id = 0;
  std::int64_t source_image_id = 0;
};

struct AugmentResult {
  DatasetFile dataset;  // originals followed by the augmented copies
  std::vector<AugmentedImage> new_images;
  std::vector<DroppedBox> dropped;
};

/// Picks ceil(fraction * N) images without replacement and adds one rotated
/// copy of each with fresh image and annotation ids. Deterministic in the
/// seed; each image draws its rotation from its own substream.
AugmentResult augment_dataset(const DatasetFile& ds, const AugmentConfig& cfg);

/// Copies the originals and writes the remapped copies. Throws IoError when
/// a source image is missing or does not match its recorded size.
void write_augmented_images(const AugmentResult& result, const std::filesystem::path& src_dir,
                            const std::filesystem::path& out_dir, unsigned threads = 0);

}  // namespace sphergeo
