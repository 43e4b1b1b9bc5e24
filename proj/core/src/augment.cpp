// SPDX-License-Identifier: Apache-2.0
#include "sphergeo/augment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "sphergeo/dataio.hpp"
#include "sphergeo/errors.hpp"
#include "sphergeo/parallel.hpp"
#include "sphergeo/random.hpp"

namespace sphergeo {

namespace {

// Unit longitude- and latitude-derivative directions at p.
Vec3 east_at(const SphPoint& p) {
  const double t = deg_to_rad(p.lon());
  return {std::cos(t), 0.0, -std::sin(t)};
}

Vec3 north_at(const SphPoint& p) {
  const double t = deg_to_rad(p.lon());
  const double f = deg_to_rad(p.lat());
  return {-std::sin(t) * std::sin(f), std::cos(f), -std::cos(t) * std::sin(f)};
}

constexpr double kPoleEps = 1e-9;

double sample_channel(const ErpImage& img, double u, double v, int c) {
  const int w = img.width();
  const int h = img.height();
  const double fu = std::floor(u);
  const double fv = std::floor(v);
  const double au = u - fu;
  const double av = v - fv;
  const auto wrap = [w](long x) { return static_cast<int>(((x % w) + w) % w); };
  const auto clamp = [h](long y) { return static_cast<int>(std::clamp<long>(y, 0, h - 1)); };
  const int x0 = wrap(static_cast<long>(fu));
  const int x1 = wrap(static_cast<long>(fu) + 1);
  const int y0 = clamp(static_cast<long>(fv));
  const int y1 = clamp(static_cast<long>(fv) + 1);
  const double top = img.at(x0, y0, c) * (1.0 - au) + img.at(x1, y0, c) * au;
  const double bottom = img.at(x0, y1, c) * (1.0 - au) + img.at(x1, y1, c) * au;
  return top * (1.0 - av) + bottom * av;
}

std::filesystem::path augmented_name(const std::string& file_name, std::int64_t new_id) {
  const std::filesystem::path p(file_name);
  return p.parent_path() / (p.stem().string() + "_aug" + std::to_string(new_id) + p.extension().string());
}

}  // namespace

void AugmentConfig::validate() const {
  const auto finite = [](double x) { return std::isfinite(x); };
  if (!finite(yaw_min) || !finite(yaw_max) || yaw_min > yaw_max || yaw_min < 0.0 || yaw_max > 360.0) {
    throw std::invalid_argument("yaw range must lie within [0, 360]");
  }
  if (!finite(pitch_min) || !finite(pitch_max) || pitch_min > pitch_max || pitch_min < -90.0 || pitch_max > 90.0) {
    throw std::invalid_argument("pitch range must lie within [-90, 90]");
  }
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw std::invalid_argument("fraction must lie in [0, 1]");
}

ErpImage remap_erp(const ErpImage& img, const RotationSpec& spec, unsigned threads) {
  require_erp_dims(img.width(), img.height());
  if (spec.yaw == 0.0 && spec.pitch == 0.0) return img;
  const int w = img.width();
  const int h = img.height();
  const int ch = img.channels();
  std::vector<std::uint8_t> out(img.data().size());
  parallel_for(static_cast<std::size_t>(h), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t y = begin; y < end; ++y) {
      for (int x = 0; x < w; ++x) {
        const SphPoint dst = erp_pixel_to_sph(x, static_cast<double>(y), w, h);
        const SphPoint src = cart_to_sph(rotate_inverse(sph_to_cart(dst), spec));
        const PixelCoord pc = sph_to_erp_pixel(src, w, h);
        for (int c = 0; c < ch; ++c) {
          const double value = std::clamp(std::round(sample_channel(img, pc.u, pc.v, c)), 0.0, 255.0);
          out[(y * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)) * static_cast<std::size_t>(ch) +
              static_cast<std::size_t>(c)] = static_cast<std::uint8_t>(value);
        }
      }
    }
  });
  return ErpImage(w, h, ch, std::move(out));
}

RollAngle local_roll_angle(const SphPoint& center, const RotationSpec& spec) {
  const Vec3 q = rotate_forward(sph_to_cart(center), spec);
  if (std::hypot(q.x, q.z) < kPoleEps) throw std::domain_error("rotated center lies on a pole");
  const SphPoint qs = cart_to_sph(q);
  const Vec3 e = rotate_forward(east_at(center), spec);
  return {rad_to_deg(std::atan2(dot(e, north_at(qs)), dot(e, east_at(qs))))};
}

FovBBox transform_bbox(const FovBBox& b, const RotationSpec& spec) {
  const Vec3 q = rotate_forward(sph_to_cart(b.center()), spec);
  if (std::hypot(q.x, q.z) < kPoleEps) throw std::domain_error("rotated box center lies on a pole");
  const SphPoint c = cart_to_sph(q);
  const double d = deg_to_rad(local_roll_angle(b.center(), spec).delta);
  const double cd = std::abs(std::cos(d));
  const double sd = std::abs(std::sin(d));
  const double max_fov = std::nextafter(180.0, 0.0);
  const double fh = std::min(b.fov_h() * cd + b.fov_v() * sd, max_fov);
  const double fv = std::min(b.fov_h() * sd + b.fov_v() * cd, max_fov);
  return FovBBox(c.lon(), c.lat(), fh, fv);
}

AugmentResult augment_dataset(const DatasetFile& ds, const AugmentConfig& cfg) {
  cfg.validate();
  validate_dataset(ds);

  AugmentResult result;
  result.dataset = ds;
  const std::size_t n = ds.images.size();
  const auto k = static_cast<std::size_t>(std::ceil(cfg.fraction * static_cast<double>(n)));
  if (k == 0) return result;

  // Partial Fisher-Yates over image positions.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng pick(cfg.seed);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(pick.below(n - i));
    std::swap(order[i], order[j]);
  }
  std::vector<std::size_t> chosen(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(chosen.begin(), chosen.end());

  std::int64_t next_image = 0;
  for (const auto& im : ds.images) next_image = std::max(next_image, im.id);
  ++next_image;
  std::int64_t next_ann = 0;
  for (const auto& a : ds.annotations) next_ann = std::max(next_ann, a.id);
  ++next_ann;

  std::map<std::int64_t, std::vector<const GroundTruth*>> by_image;
  for (const auto& a : ds.annotations) by_image[a.image_id].push_back(&a);

  for (const std::size_t idx : chosen) {
    const ImageInfo& src = ds.images[idx];
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(src.id)));
    RotationSpec spec;
    spec.yaw = rng.uniform(cfg.yaw_min, cfg.yaw_max);
    spec.pitch = rng.uniform(cfg.pitch_min, cfg.pitch_max);

    AugmentedImage aug;
    aug.source_id = src.id;
    aug.spec = spec;
    aug.info = src;
    aug.info.id = next_image++;
    aug.info.file_name = augmented_name(src.file_name, aug.info.id).generic_string();
    result.dataset.images.push_back(aug.info);
    result.new_images.push_back(aug);

    for (const GroundTruth* a : by_image[src.id]) {
      const Vec3 q = rotate_forward(sph_to_cart(a->bbox.center()), spec);
      if (std::abs(cart_to_sph(q).lat()) > 90.0 - kPoleDropDeg) {
        result.dropped.push_back({a->id, src.id});
        continue;
      }
      GroundTruth g = *a;
      g.id = next_ann++;
      g.image_id = aug.info.id;
      g.bbox = transform_bbox(a->bbox, spec);
      result.dataset.annotations.push_back(g);
    }
  }
  return result;
}

void write_augmented_images(const AugmentResult& result, const std::filesystem::path& src_dir,
                            const std::filesystem::path& out_dir, unsigned threads) {
  namespace fs = std::filesystem;
  std::map<std::int64_t, const ImageInfo*> by_id;
  for (const auto& im : result.dataset.images) by_id[im.id] = &im;

  const auto ensure_parent = [](const fs::path& p) {
    std::error_code ec;
    if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + p.parent_path().string() + ": " + ec.message());
  };

  for (const auto& im : result.dataset.images) {
    bool is_new = false;
    for (const auto& a : result.new_images) is_new = is_new || a.info.id == im.id;
    if (is_new) continue;
    const fs::path from = src_dir / im.file_name;
    const fs::path to = out_dir / im.file_name;
    if (!fs::exists(from)) throw IoError("missing image " + from.string());
    ensure_parent(to);
    std::error_code ec;
    if (fs::exists(to) && fs::equivalent(from, to)) continue;
    fs::copy_file(from, to, fs::copy_options::overwrite_existing, ec);
    if (ec) throw IoError("cannot copy " + from.string() + ": " + ec.message());
  }

  for (const auto& aug : result.new_images) {
    const ImageInfo& src = *by_id.at(aug.source_id);
    const fs::path from = src_dir / src.file_name;
    if (!fs::exists(from)) throw IoError("missing image " + from.string());
    const ErpImage img = load_image(from);
    if (img.width() != src.width || img.height() != src.height) {
      throw IoError("image " + from.string() + " is " + std::to_string(img.width()) + "x" +
                    std::to_string(img.height()) + " but the dataset records " + std::to_string(src.width) + "x" +
                    std::to_string(src.height));
    }
    const fs::path to = out_dir / aug.info.file_name;
    ensure_parent(to);
    save_image(remap_erp(img, aug.spec, threads), to);
  }
}

}  // namespace sphergeo
