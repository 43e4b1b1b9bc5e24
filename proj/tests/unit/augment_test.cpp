// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "sphergeo/augment.hpp"
#include "sphergeo/dataio.hpp"
#include "sphergeo/errors.hpp"
#include "sphergeo/iou.hpp"

using namespace sphergeo;

namespace {

// Bearing of the image of a short eastward step, from lon/lat differences.
double fd_roll(const SphPoint& c, const RotationSpec& spec, double h = 1e-5) {
  const SphPoint q0 = cart_to_sph(rotate_forward(sph_to_cart(c), spec));
  const SphPoint q1 = cart_to_sph(rotate_forward(sph_to_cart(SphPoint(c.lon() + h, c.lat())), spec));
  double dlon = q1.lon() - q0.lon();
  if (dlon > 180) dlon -= 360;
  if (dlon < -180) dlon += 360;
  const double dlat = q1.lat() - q0.lat();
  return std::atan2(dlat, dlon * std::cos(sgtest::rad(q0.lat()))) * 180 / sgtest::kPi;
}

double angle_diff(double a, double b) {
  double d = std::fmod(a - b + 540.0, 360.0) - 180.0;
  return std::abs(d);
}

DatasetFile grid_dataset(int images, int per_image) {
  DatasetFile ds;
  ds.categories = {{1, "thing"}};
  sgtest::BoxGen g(static_cast<std::uint64_t>(images * 1000 + per_image));
  std::int64_t id = 1;
  for (int i = 1; i <= images; ++i) {
    ds.images.push_back({i, "img" + std::to_string(i) + ".png", 64, 32});
    for (int k = 0; k < per_image; ++k) ds.annotations.push_back({id++, g.box(-60, 60, 10, 40), 1, i});
  }
  return ds;
}

ErpImage blob_image(int w, int h, const SphPoint& at) {
  ErpImage img(w, h, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double d = great_circle_distance(erp_pixel_to_sph(x, y, w, h), at);
      img.at(x, y, 0) = static_cast<std::uint8_t>(std::lround(250.0 * std::exp(-d * d / (2 * 0.03 * 0.03))));
    }
  }
  return img;
}

std::pair<int, int> brightest(const ErpImage& img) {
  int bx = 0, by = 0;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (img.at(x, y, 0) > img.at(bx, by, 0)) {
        bx = x;
        by = y;
      }
    }
  }
  return {bx, by};
}

}  // namespace

TEST(RemapErp, IdentityIsBitExact) {
  const ErpImage img = sgtest::natural_image(128, 64);
  EXPECT_EQ(remap_erp(img, {}), img);
  EXPECT_EQ(remap_erp(img, {360.0, 0.0}), img);
}

TEST(RemapErp, YawQuarterTurnShiftsColumns) {
  const int w = 64, h = 32;
  ErpImage img(w, h, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 20; x < 24; ++x) img.at(x, y, 0) = 200;
  }
  const ErpImage out = remap_erp(img, {90.0, 0.0});
  // Direction follows the box transform of the stripe center.
  const SphPoint stripe = erp_pixel_to_sph(21.5, h / 2.0, w, h);
  const double moved = transform_bbox(FovBBox(stripe.lon(), 0, 10, 10), {90.0, 0.0}).lon();
  const int shift = static_cast<int>(std::lround(sph_to_erp_pixel(SphPoint(moved, 0), w, h).u - 21.5));
  EXPECT_EQ(std::abs(shift), w / 4);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) EXPECT_EQ(out.at(((x + shift) % w + w) % w, y, 0), img.at(x, y, 0)) << x << "," << y;
  }
}

TEST(RemapErp, RoundTripPsnr) {
  const ErpImage img = sgtest::natural_image(512, 256);
  for (const RotationSpec spec : {RotationSpec{37, 20}, RotationSpec{200, -30}, RotationSpec{0, 25}}) {
    const ErpImage fwd = remap_erp(img, spec, 2);
    const ErpImage back = remap_erp(remap_erp(fwd, {0.0, -spec.pitch}), {360.0 - spec.yaw, 0.0});
    EXPECT_GE(sgtest::psnr(img, back, 256 / 8), 30.0) << spec.yaw << " " << spec.pitch;
  }
}

TEST(RemapErp, ThreadCountDoesNotMatter) {
  const ErpImage img = sgtest::natural_image(256, 128);
  EXPECT_EQ(remap_erp(img, {12.5, 17}, 1), remap_erp(img, {12.5, 17}, 4));
}

TEST(RollAngle, Examples) {
  EXPECT_NEAR(local_roll_angle(SphPoint(40, 30), {75, 0}).delta, 0.0, 1e-12);
  EXPECT_NEAR(local_roll_angle(SphPoint(0, 30), {0, 20}).delta, 0.0, 1e-12);
  EXPECT_NEAR(angle_diff(local_roll_angle(SphPoint(180, -10), {0, 20}).delta, 0.0), 0.0, 1e-12);
  EXPECT_NEAR(local_roll_angle(SphPoint(90, 0), {0, 20}).delta, -20.0, 1e-9);
  EXPECT_NEAR(local_roll_angle(SphPoint(-90, 0), {0, 20}).delta, 20.0, 1e-9);
  EXPECT_THROW(local_roll_angle(SphPoint(0, 70), {0, 20}), std::domain_error);
}

TEST(RollAngle, MatchesFiniteDifferenceBearing) {
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      const SphPoint c(-160 + 80 * i, -60 + 30 * j);
      for (const RotationSpec spec : {RotationSpec{30, 25}, RotationSpec{300, -15}}) {
        EXPECT_LT(angle_diff(local_roll_angle(c, spec).delta, fd_roll(c, spec)), 0.1)
            << c.lon() << "," << c.lat();
      }
    }
  }
}

TEST(TransformBbox, Examples) {
  const FovBBox yawed = transform_bbox(FovBBox(10, 20, 30, 40), {50, 0});
  EXPECT_NEAR(angle_diff(yawed.lon(), 10 - 50), 0, 1e-9);
  EXPECT_NEAR(yawed.lat(), 20, 1e-9);
  EXPECT_NEAR(yawed.fov_h(), 30, 1e-9);
  EXPECT_NEAR(yawed.fov_v(), 40, 1e-9);

  const FovBBox pitched = transform_bbox(FovBBox(0, 0, 30, 40), {0, 20});
  EXPECT_NEAR(pitched.lon(), 0, 1e-9);
  EXPECT_NEAR(pitched.lat(), 20, 1e-9);
  EXPECT_NEAR(pitched.fov_h(), 30, 1e-9);
  EXPECT_NEAR(pitched.fov_v(), 40, 1e-9);

  // At (90, 0) pitch rolls the box by -pitch: a 90 degree pitch would swap
  // the axes, 45 mixes them equally.
  const FovBBox rolled = transform_bbox(FovBBox(90, 0, 30, 10), {0, 45});
  const double s = std::sqrt(0.5);
  EXPECT_NEAR(rolled.fov_h(), 30 * s + 10 * s, 1e-9);
  EXPECT_NEAR(rolled.fov_v(), 30 * s + 10 * s, 1e-9);
}

TEST(TransformBbox, NearPoleStaysValid) {
  sgtest::BoxGen g(131);
  int checked = 0;
  for (int i = 0; i < 2000; ++i) {
    const FovBBox b(g.uniform(-180, 180), g.uniform(60, 89.9) * (g.coin() ? 1 : -1), g.uniform(100, 179.9),
                    g.uniform(100, 179.9));
    const RotationSpec spec{g.uniform(0, 360), g.uniform(-30, 30)};
    const Vec3 q = rotate_forward(sph_to_cart(b.center()), spec);
    if (std::abs(cart_to_sph(q).lat()) > 90 - kPoleDropDeg) continue;
    const FovBBox t = transform_bbox(b, spec);
    EXPECT_GT(t.fov_h(), 0);
    EXPECT_LT(t.fov_h(), 180);
    EXPECT_LT(t.fov_v(), 180);
    EXPECT_LE(std::abs(t.lat()), 90);
    ++checked;
  }
  EXPECT_GT(checked, 1000);
}

TEST(TransformBbox, YawPreservesFovIoU) {
  sgtest::BoxGen g(137);
  for (int i = 0; i < 200; ++i) {
    const FovBBox a = g.box(-70, 70), b = g.near(a, 15, -70, 70);
    const RotationSpec spec{g.uniform(0, 360), 0};
    EXPECT_NEAR(fov_iou(transform_bbox(a, spec), transform_bbox(b, spec)), fov_iou(a, b), 1e-12);
  }
}

TEST(TransformBbox, CenterIsInsideAndMatchesImage) {
  const int w = 256, h = 128;
  sgtest::BoxGen g(139);
  for (int i = 0; i < 12; ++i) {
    const FovBBox b = g.box(-50, 50, 10, 30);
    const RotationSpec spec{g.uniform(0, 360), g.uniform(-30, 30)};
    const FovBBox t = transform_bbox(b, spec);
    EXPECT_TRUE(contains(t, t.center()));
    const ErpImage out = remap_erp(blob_image(w, h, b.center()), spec);
    const auto [bx, by] = brightest(out);
    const PixelCoord want = sph_to_erp_pixel(t.center(), w, h);
    double du = std::abs(bx - want.u);
    du = std::min(du, w - du);
    EXPECT_LE(du, 1.0) << i;
    EXPECT_LE(std::abs(by - want.v), 1.0) << i;
  }
}

TEST(AugmentDataset, FractionZeroIsIdentity) {
  const DatasetFile ds = grid_dataset(10, 3);
  AugmentConfig cfg;
  cfg.fraction = 0;
  const AugmentResult r = augment_dataset(ds, cfg);
  EXPECT_EQ(r.dataset, ds);
  EXPECT_TRUE(r.new_images.empty());
}

TEST(AugmentDataset, HalfFractionAddsFiveImages) {
  const DatasetFile ds = grid_dataset(10, 3);
  AugmentConfig cfg;
  cfg.seed = 5;
  const AugmentResult r = augment_dataset(ds, cfg);
  ASSERT_EQ(r.dataset.images.size(), 15u);
  EXPECT_EQ(r.new_images.size(), 5u);
  EXPECT_EQ(r.dataset.annotations.size() + r.dropped.size(), 30u + 15u);
  EXPECT_NO_THROW(validate_dataset(r.dataset));
  for (std::size_t i = 0; i < r.new_images.size(); ++i) {
    EXPECT_EQ(r.new_images[i].info.id, 11 + static_cast<std::int64_t>(i));
    EXPECT_GE(r.new_images[i].spec.pitch, -30);
    EXPECT_LT(r.new_images[i].spec.pitch, 30);
    EXPECT_NE(r.new_images[i].info.file_name.find("_aug"), std::string::npos);
  }
  EXPECT_EQ(r.dataset.annotations[30].id, 31);
  AugmentConfig odd = cfg;
  odd.fraction = 0.25;
  EXPECT_EQ(augment_dataset(ds, odd).new_images.size(), 3u);
}

TEST(AugmentDataset, DeterministicInSeed) {
  const DatasetFile ds = grid_dataset(10, 4);
  AugmentConfig cfg;
  cfg.seed = 77;
  const AugmentResult a = augment_dataset(ds, cfg);
  const AugmentResult b = augment_dataset(ds, cfg);
  EXPECT_EQ(a.dataset, b.dataset);
  cfg.seed = 78;
  EXPECT_NE(augment_dataset(ds, cfg).dataset, a.dataset);
}

TEST(AugmentDataset, DropsBoxesRotatedOntoAPole) {
  DatasetFile ds;
  ds.images = {{1, "a.png", 64, 32}};
  ds.categories = {{1, "x"}};
  ds.annotations = {{1, FovBBox(0, 0, 10, 10), 1, 1}, {2, FovBBox(0, 80, 10, 10), 1, 1}};
  AugmentConfig cfg;
  cfg.fraction = 1;
  cfg.yaw_min = cfg.yaw_max = 0;
  cfg.pitch_min = cfg.pitch_max = 0;
  EXPECT_TRUE(augment_dataset(ds, cfg).dropped.empty());
  // Find the pitch sign that carries lat 80 over the north pole.
  for (double p : {10.0, -10.0}) {
    const Vec3 q = rotate_forward(sph_to_cart(SphPoint(0, 80)), {0, p});
    if (cart_to_sph(q).lat() < 89) continue;
    cfg.pitch_min = cfg.pitch_max = p;
    const AugmentResult r = augment_dataset(ds, cfg);
    ASSERT_EQ(r.dropped.size(), 1u);
    EXPECT_EQ(r.dropped[0].annotation_id, 2);
    EXPECT_EQ(r.dataset.annotations.size(), 3u);
  }
}

TEST(AugmentConfig, Validation) {
  AugmentConfig c;
  EXPECT_NO_THROW(c.validate());
  c.fraction = 1.5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.pitch_max = 95;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.yaw_min = 10;
  c.yaw_max = 5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(WriteAugmentedImages, WritesCopiesAndRejectsMissingSources) {
  sgtest::TempDir src, out;
  DatasetFile ds = grid_dataset(2, 1);
  for (const auto& im : ds.images) save_image(sgtest::natural_image(64, 32), src / im.file_name);
  AugmentConfig cfg;
  cfg.fraction = 1;
  const AugmentResult r = augment_dataset(ds, cfg);
  write_augmented_images(r, src.path(), out.path(), 1);
  for (const auto& im : r.dataset.images) {
    const ErpImage img = load_image(out / im.file_name);
    EXPECT_EQ(img.width(), 64);
  }
  EXPECT_THROW(write_augmented_images(r, out / "nowhere", out / "again", 1), IoError);

  ds.images[0].width = 128;
  ds.images[0].height = 64;
  const AugmentResult bad = augment_dataset(ds, cfg);
  sgtest::TempDir out2;
  EXPECT_THROW(write_augmented_images(bad, src.path(), out2.path(), 1), IoError);
}
