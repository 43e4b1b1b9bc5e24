// SPDX-License-Identifier: Apache-2.0
#include "sphergeo/dataio.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace sphergeo {

using nlohmann::json;

namespace {

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Map the byte offset onto a 1-based line and column.
    const std::size_t offset = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < offset; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError("syntax error at line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                         e.what(),
                     line, column);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), 0, 0);
  }
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw ValidationError(where + " is not an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(where + " is missing \"" + key + "\"");
  return *it;
}

std::int64_t get_int(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_number_integer()) throw ValidationError(where + ": \"" + key + "\" must be an integer");
  return v.get<std::int64_t>();
}

double get_number(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_number()) throw ValidationError(where + ": \"" + key + "\" must be a number");
  return v.get<double>();
}

std::string get_string(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_string()) throw ValidationError(where + ": \"" + key + "\" must be a string");
  return v.get<std::string>();
}

FovBBox box_from_json(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 4) throw ValidationError(where + ": bbox must be an array of 4 numbers");
  double f[4];
  for (std::size_t i = 0; i < 4; ++i) {
    if (!v[i].is_number()) throw ValidationError(where + ": bbox must be an array of 4 numbers");
    f[i] = v[i].get<double>();
  }
  try {
    return FovBBox(f[0], f[1], f[2], f[3]);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

json box_to_json(const FovBBox& b) { return json::array({b.lon(), b.lat(), b.fov_h(), b.fov_v()}); }

const json& array_field(const json& root, const char* key) {
  const json& v = field(root, key, "top level");
  if (!v.is_array()) throw ValidationError(std::string("\"") + key + "\" must be an array");
  return v;
}

void check_format(const json& root) {
  const auto it = root.find("format");
  if (it != root.end() && (!it->is_string() || it->get<std::string>() != kFormatTag)) {
    throw ValidationError(std::string("unsupported format tag, expected \"") + kFormatTag + "\"");
  }
}

std::string record_tag(const char* kind, const json& rec, std::size_t index) {
  const auto it = rec.is_object() ? rec.find("id") : rec.end();
  if (rec.is_object() && it != rec.end() && it->is_number_integer()) {
    return std::string(kind) + " " + std::to_string(it->get<std::int64_t>());
  }
  return std::string(kind) + " #" + std::to_string(index);
}

Detection detection_from_json(const json& rec, std::size_t index) {
  const std::string where = "prediction #" + std::to_string(index);
  Detection d;
  d.image_id = get_int(rec, "image_id", where);
  d.category_id = get_int(rec, "category_id", where);
  d.bbox = box_from_json(field(rec, "bbox", where), where);
  d.score = get_number(rec, "score", where);
  if (!(d.score >= 0.0 && d.score <= 1.0)) throw ValidationError(where + ": score outside [0, 1]");
  return d;
}

}  // namespace

ErpImage::ErpImage(int width, int height, int channels)
    : ErpImage(width, height, channels,
               std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                         static_cast<std::size_t>(std::max(height, 0)) *
                                         static_cast<std::size_t>(std::max(channels, 0)))) {}

ErpImage::ErpImage(int width, int height, int channels, std::vector<std::uint8_t> data) {
  require_erp_dims(width, height);
  if (channels != 1 && channels != 3) throw std::invalid_argument("ERP image must have 1 or 3 channels");
  if (data.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
                         static_cast<std::size_t>(channels)) {
    throw std::invalid_argument("ERP pixel buffer has the wrong size");
  }
  width_ = width;
  height_ = height;
  channels_ = channels;
  data_ = std::move(data);
}

DatasetFile parse_dataset(const std::string& text) {
  const json root = parse_json(text);
  if (!root.is_object()) throw ValidationError("dataset file must be a JSON object");
  check_format(root);
  DatasetFile ds;
  const json& images = array_field(root, "images");
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::string where = record_tag("image", images[i], i);
    ImageInfo im;
    im.id = get_int(images[i], "id", where);
    im.file_name = get_string(images[i], "file_name", where);
    im.width = static_cast<int>(get_int(images[i], "width", where));
    im.height = static_cast<int>(get_int(images[i], "height", where));
    ds.images.push_back(std::move(im));
  }
  const json& cats = array_field(root, "categories");
  for (std::size_t i = 0; i < cats.size(); ++i) {
    const std::string where = record_tag("category", cats[i], i);
    ds.categories.push_back({get_int(cats[i], "id", where), get_string(cats[i], "name", where)});
  }
  const json& anns = array_field(root, "annotations");
  for (std::size_t i = 0; i < anns.size(); ++i) {
    const std::string where = record_tag("annotation", anns[i], i);
    GroundTruth g;
    g.id = get_int(anns[i], "id", where);
    g.image_id = get_int(anns[i], "image_id", where);
    g.category_id = get_int(anns[i], "category_id", where);
    g.bbox = box_from_json(field(anns[i], "bbox", where), where);
    ds.annotations.push_back(g);
  }
  validate_dataset(ds);
  return ds;
}

std::string dump_dataset(const DatasetFile& ds) {
  json root = json::object();
  root["format"] = kFormatTag;
  root["images"] = json::array();
  for (const auto& im : ds.images) {
    root["images"].push_back(
        {{"id", im.id}, {"file_name", im.file_name}, {"width", im.width}, {"height", im.height}});
  }
  root["categories"] = json::array();
  for (const auto& c : ds.categories) root["categories"].push_back({{"id", c.id}, {"name", c.name}});
  root["annotations"] = json::array();
  for (const auto& a : ds.annotations) {
    root["annotations"].push_back(
        {{"id", a.id}, {"image_id", a.image_id}, {"category_id", a.category_id}, {"bbox", box_to_json(a.bbox)}});
  }
  return root.dump(2) + "\n";
}

PredictionFile parse_predictions(const std::string& text) {
  const json root = parse_json(text);
  const json* list = &root;
  if (root.is_object()) {
    check_format(root);
    list = &array_field(root, "predictions");
  } else if (!root.is_array()) {
    throw ValidationError("prediction file must be an object or an array");
  }
  PredictionFile out;
  for (std::size_t i = 0; i < list->size(); ++i) out.push_back(detection_from_json((*list)[i], i));
  return out;
}

std::string dump_predictions(const PredictionFile& preds) {
  json root = json::object();
  root["format"] = kFormatTag;
  root["predictions"] = json::array();
  for (const auto& d : preds) {
    root["predictions"].push_back({{"image_id", d.image_id},
                                   {"category_id", d.category_id},
                                   {"bbox", box_to_json(d.bbox)},
                                   {"score", d.score}});
  }
  return root.dump(2) + "\n";
}

std::vector<FovBBox> parse_boxes(const std::string& text) {
  const json root = parse_json(text);
  if (root.is_object()) {
    std::vector<FovBBox> out;
    for (const auto& a : parse_dataset(text).annotations) out.push_back(a.bbox);
    return out;
  }
  if (!root.is_array()) throw ValidationError("box list must be an array of [lon, lat, fov_h, fov_v] entries");
  std::vector<FovBBox> out;
  for (std::size_t i = 0; i < root.size(); ++i) out.push_back(box_from_json(root[i], "box #" + std::to_string(i)));
  return out;
}

std::string report_to_json(const EvalReport& r) {
  const auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  const auto summary = [&](const ApSummary& s) {
    return json{{"AP", opt(s.ap)}, {"AP50", opt(s.ap50)}, {"AP75", opt(s.ap75)}, {"num_gt", s.num_gt},
                {"num_det", s.num_det}};
  };
  json root = json::object();
  root["format"] = kFormatTag;
  root["iou_method"] = r.method;
  root["overall"] = summary(r.overall);
  root["AP_s"] = opt(r.ap_small);
  root["AP_m"] = opt(r.ap_medium);
  root["AP_l"] = opt(r.ap_large);
  root["bands"] = json::array();
  for (const auto& b : r.bands) {
    json j = summary(b.summary);
    j["band"] = {b.band.lo, b.band.hi};
    if (b.summary.num_gt == 0) j["note"] = "no ground truth";
    root["bands"].push_back(std::move(j));
  }
  root["per_category"] = json::array();
  for (const auto& c : r.per_category) {
    json j = summary(c.summary);
    j["category_id"] = c.category_id;
    j["name"] = c.name;
    root["per_category"].push_back(std::move(j));
  }
  return root.dump(2) + "\n";
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

DatasetFile load_dataset(const std::filesystem::path& path) { return parse_dataset(read_text_file(path)); }

void save_dataset(const DatasetFile& ds, const std::filesystem::path& path) {
  write_text_file(path, dump_dataset(ds));
}

PredictionFile load_predictions(const std::filesystem::path& path) { return parse_predictions(read_text_file(path)); }

void save_predictions(const PredictionFile& preds, const std::filesystem::path& path) {
  write_text_file(path, dump_predictions(preds));
}

std::vector<FovBBox> load_boxes(const std::filesystem::path& path) { return parse_boxes(read_text_file(path)); }

ErpImage load_image(const std::filesystem::path& path) {
  const cv::Mat m = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (m.empty()) throw IoError("cannot decode image " + path.string());
  if (m.depth() != CV_8U) throw IoError("only 8-bit images are supported: " + path.string());
  const int in_ch = m.channels();
  if (in_ch != 1 && in_ch != 3 && in_ch != 4) throw IoError("unsupported channel count in " + path.string());
  if (m.cols != 2 * m.rows) {
    throw IoError("image " + path.string() + " is " + std::to_string(m.cols) + "x" + std::to_string(m.rows) +
                  ", expected a 2:1 equirectangular raster");
  }
  const int out_ch = in_ch == 1 ? 1 : 3;
  std::vector<std::uint8_t> data(static_cast<std::size_t>(m.cols) * static_cast<std::size_t>(m.rows) *
                                 static_cast<std::size_t>(out_ch));
  std::size_t k = 0;
  for (int y = 0; y < m.rows; ++y) {
    const std::uint8_t* row = m.ptr<std::uint8_t>(y);
    for (int x = 0; x < m.cols; ++x) {
      const std::uint8_t* px = row + static_cast<std::ptrdiff_t>(x) * in_ch;
      if (out_ch == 1) {
        data[k++] = px[0];
      } else {
        data[k++] = px[2];
        data[k++] = px[1];
        data[k++] = px[0];
      }
    }
  }
  return ErpImage(m.cols, m.rows, out_ch, std::move(data));
}

void save_image(const ErpImage& img, const std::filesystem::path& path) {
  const int ch = img.channels();
  cv::Mat out(img.height(), img.width(), ch == 1 ? CV_8UC1 : CV_8UC3);
  for (int y = 0; y < img.height(); ++y) {
    std::uint8_t* row = out.ptr<std::uint8_t>(y);
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < ch; ++c) row[x * ch + c] = img.at(x, y, ch == 1 ? 0 : 2 - c);
    }
  }
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), out);
  } catch (const cv::Exception& e) {
    throw IoError("cannot encode image " + path.string() + ": " + e.what());
  }
  if (!ok) throw IoError("cannot write image " + path.string());
}

}  // namespace sphergeo
