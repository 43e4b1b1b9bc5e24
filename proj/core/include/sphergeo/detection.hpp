// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "sphergeo/bfov.hpp"

namespace sphergeo {

struct Detection {
  FovBBox bbox;
  double score = 0.0;
  std::int64_t category_id = 0;
  std::int64_t image_id = 0;

  bool operator==(const Detection&) const = default;
};

struct GroundTruth {
  std::int64_t id = 0;
  FovBBox bbox;
  std::int64_t category_id = 0;
  std::int64_t image_id = 0;

  bool operator==(const GroundTruth&) const = default;
};

/// Throws std::invalid_argument unless score is in [0, 1].
void validate_score(double score);

}  // namespace sphergeo
