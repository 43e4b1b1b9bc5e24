// SPDX-License-Identifier: Apache-2.0
#include "sphergeo/dataset.hpp"

#include <set>
#include <string>

#include "sphergeo/errors.hpp"

namespace sphergeo {

void validate_dataset(const DatasetFile& ds) {
  std::set<std::int64_t> images;
  for (const auto& im : ds.images) {
    if (!images.insert(im.id).second) throw ValidationError("duplicate image id " + std::to_string(im.id));
    if (im.width <= 0 || im.height <= 0) {
      throw ValidationError("image " + std::to_string(im.id) + " has non-positive dimensions");
    }
  }
  std::set<std::int64_t> categories;
  for (const auto& c : ds.categories) {
    if (!categories.insert(c.id).second) throw ValidationError("duplicate category id " + std::to_string(c.id));
  }
  std::set<std::int64_t> annotations;
  for (const auto& a : ds.annotations) {
    const std::string tag = "annotation " + std::to_string(a.id);
    if (!annotations.insert(a.id).second) throw ValidationError("duplicate " + tag);
    if (!images.contains(a.image_id)) {
      throw ValidationError(tag + " references unknown image " + std::to_string(a.image_id));
    }
    if (!categories.contains(a.category_id)) {
      throw ValidationError(tag + " references unknown category " + std::to_string(a.category_id));
    }
  }
}

void validate_detections(const DatasetFile& ds, const std::vector<Detection>& dets) {
  std::set<std::int64_t> images;
  std::set<std::int64_t> categories;
  for (const auto& im : ds.images) images.insert(im.id);
  for (const auto& c : ds.categories) categories.insert(c.id);
  for (std::size_t i = 0; i < dets.size(); ++i) {
    const auto& d = dets[i];
    const std::string tag = "detection #" + std::to_string(i);
    if (!images.contains(d.image_id)) {
      throw ValidationError(tag + " references unknown image " + std::to_string(d.image_id));
    }
    if (!categories.contains(d.category_id)) {
      throw ValidationError(tag + " references unknown category " + std::to_string(d.category_id));
    }
    if (!(d.score >= 0.0 && d.score <= 1.0)) throw ValidationError(tag + " has score outside [0, 1]");
  }
}

}  // namespace sphergeo
