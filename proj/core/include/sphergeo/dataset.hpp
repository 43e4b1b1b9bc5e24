// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sphergeo/detection.hpp"

namespace sphergeo {

struct ImageInfo {
  std::int64_t id = 0;
  std::string file_name;
  int width = 0;
  int height = 0;

  bool operator==(const ImageInfo&) const = default;
};

struct Category {
  std::int64_t id = 0;
  std::string name;

  bool operator==(const Category&) const = default;
};

struct DatasetFile {
  std::vector<ImageInfo> images;
  std::vector<Category> categories;
  std::vector<GroundTruth> annotations;

  bool operator==(const DatasetFile&) const = default;
};

/// Unique ids and referential integrity. Throws ValidationError naming the
/// offending record.
void validate_dataset(const DatasetFile& ds);

/// Every detection must reference a known image and category and carry a
/// score in [0, 1]. Throws ValidationError naming the offending id.
void validate_detections(const DatasetFile& ds, const std::vector<Detection>& dets);

}  // namespace sphergeo
