// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace sphergeo {

/// 8-bit equirectangular raster, interleaved channels (1 = gray, 3 = RGB).
class ErpImage {
 public:
  ErpImage() = default;
  /// Zero-filled. Throws std::invalid_argument unless width == 2 * height
  /// and channels is 1 or 3.
  ErpImage(int width, int height, int channels);
  ErpImage(int width, int height, int channels, std::vector<std::uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }

  std::uint8_t at(int x, int y, int c) const { return data_[index(x, y, c)]; }
  std::uint8_t& at(int x, int y, int c) { return data_[index(x, y, c)]; }

  const std::vector<std::uint8_t>& data() const { return data_; }

  bool operator==(const ErpImage&) const = default;

 private:
  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(c);
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<std::uint8_t> data_;
};

}  // namespace sphergeo
