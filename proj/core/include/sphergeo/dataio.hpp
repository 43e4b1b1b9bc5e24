// SPDX-License-Identifier: Apache-2.0
//
// File formats (UTF-8 JSON, degrees, bbox = [lon, lat, fov_h, fov_v]):
//
//   dataset     {"format": "bfov/1",
//                "images":      [{"id", "file_name", "width", "height"}],
//                "categories":  [{"id", "name"}],
//                "annotations": [{"id", "image_id", "category_id", "bbox"}]}
//   predictions {"format": "bfov/1",
//                "predictions": [{"image_id", "category_id", "bbox", "score"}]}
//               (a bare top-level array of prediction records is also read)
//   box list    a bare array of bbox arrays, or any dataset file
//
// Images are PNG or JPEG equirectangular rasters (2:1).
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sphergeo/dataset.hpp"
#include "sphergeo/errors.hpp"
#include "sphergeo/evaluation.hpp"
#include "sphergeo/image.hpp"

namespace sphergeo {

inline constexpr const char* kFormatTag = "bfov/1";

using PredictionFile = std::vector<Detection>;

DatasetFile parse_dataset(const std::string& text);
std::string dump_dataset(const DatasetFile& ds);
DatasetFile load_dataset(const std::filesystem::path& path);
void save_dataset(const DatasetFile& ds, const std::filesystem::path& path);

PredictionFile parse_predictions(const std::string& text);
std::string dump_predictions(const PredictionFile& preds);
PredictionFile load_predictions(const std::filesystem::path& path);
void save_predictions(const PredictionFile& preds, const std::filesystem::path& path);

/// Reads a bare box array or the annotations of a dataset file.
std::vector<FovBBox> parse_boxes(const std::string& text);
std::vector<FovBBox> load_boxes(const std::filesystem::path& path);

std::string report_to_json(const EvalReport& report);

ErpImage load_image(const std::filesystem::path& path);
/// Format from the extension (.png, .jpg, .jpeg).
void save_image(const ErpImage& img, const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace sphergeo
