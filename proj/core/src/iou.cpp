// SPDX-License-Identifier: Apache-2.0
#include "sphergeo/iou.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rect_terms.hpp"
#include "sphergeo/parallel.hpp"
#include "sphergeo/random.hpp"

namespace sphergeo {

namespace {

detail::BoxT<double> as_terms(const FovBBox& b) { return {b.lon(), b.lat(), b.fov_h(), b.fov_v()}; }

// Membership test with the frame and half-angle tangents hoisted out of the
// sampling loop. Same predicate as contains().
class BoxTester {
 public:
  explicit BoxTester(const FovBBox& b)
      : frame_(b),
        tan_h_(std::tan(deg_to_rad(b.fov_h() / 2.0))),
        tan_v_(std::tan(deg_to_rad(b.fov_v() / 2.0))) {}

  bool operator()(const Vec3& p) const {
    const Vec3 f = frame_.to_frame(p);
    if (!(f.z > 0.0)) return false;
    return std::abs(f.x) <= tan_h_ * f.z + kContainsEps && std::abs(f.y) <= tan_v_ * f.z + kContainsEps;
  }

 private:
  BoxFrame frame_;
  double tan_h_;
  double tan_v_;
};

// Point on the minor arc p -> q lying on the plane with signed distances dp, dq.
Vec3 arc_plane_crossing(const Vec3& p, const Vec3& q, double dp, double dq) {
  return normalized(q * std::abs(dp) + p * std::abs(dq));
}

std::vector<Vec3> clip_against(const std::vector<Vec3>& poly, const Vec3& n) {
  std::vector<double> dist(poly.size());
  bool all_on_plane = true;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    dist[i] = dot(n, poly[i]);
    if (std::abs(dist[i]) > kClipEps) all_on_plane = false;
  }
  if (all_on_plane) throw DegenerateClipError("every polygon vertex lies on a clip plane");

  std::vector<Vec3> out;
  out.reserve(poly.size() + 2);
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const std::size_t j = (i + poly.size() - 1) % poly.size();
    const Vec3& prev = poly[j];
    const Vec3& cur = poly[i];
    const double dp = dist[j];
    const double dc = dist[i];
    if (dc >= -kClipEps) {
      if (dp < -kClipEps && dc > kClipEps) out.push_back(arc_plane_crossing(prev, cur, dp, dc));
      out.push_back(cur);
    } else if (dp > kClipEps) {
      out.push_back(arc_plane_crossing(prev, cur, dp, dc));
    }
  }
  return out;
}

void drop_duplicates(std::vector<Vec3>& poly) {
  std::vector<Vec3> out;
  out.reserve(poly.size());
  for (const Vec3& v : poly) {
    if (out.empty() || (v - out.back()).norm() > kClipEps) out.push_back(v);
  }
  while (out.size() > 1 && (out.front() - out.back()).norm() <= kClipEps) out.pop_back();
  poly = std::move(out);
}

double corner_area(const FovBBox& b) {
  const auto corners = box_corners(b);
  return spherical_polygon_area(corners);
}

}  // namespace

IoUMethod IoUMethod::monte_carlo(std::size_t samples, std::uint64_t seed) {
  if (samples < 1000) throw std::invalid_argument("Monte-Carlo IoU needs at least 1000 samples");
  return {Kind::kMonteCarlo, samples, seed};
}

IoUMethod IoUMethod::parse(const std::string& name) {
  if (name == "fov") return fov();
  if (name == "sph") return sph();
  if (name == "exact") return exact();
  if (name == "mc") return {Kind::kMonteCarlo};
  throw std::invalid_argument("unknown IoU method '" + name + "' (expected fov, sph, exact or mc)");
}

std::string IoUMethod::name() const {
  switch (kind) {
    case Kind::kFov: return "fov";
    case Kind::kSph: return "sph";
    case Kind::kExact: return "exact";
    case Kind::kMonteCarlo: return "mc";
  }
  return "?";
}

double fov_distance(const FovBBox& bg, const FovBBox& bd) {
  return wrap_lon(bd.lon() - bg.lon()) * std::cos(deg_to_rad((bg.lat() + bd.lat()) * 0.5));
}

double fov_iou(const FovBBox& bg, const FovBBox& bd) {
  const auto t = detail::rect_terms(as_terms(bg), as_terms(bd), detail::CenterModel::kFovDistance, false, nullptr);
  return t.inter / t.uni;
}

double sph_iou(const FovBBox& bg, const FovBBox& bd, SphAreaModel area) {
  const auto t = detail::rect_terms(as_terms(bg), as_terms(bd), detail::CenterModel::kEquator, false, nullptr);
  if (area == SphAreaModel::kPlanar) return t.inter / t.uni;

  // Spherical-segment variant: every rectangle (including the intersection,
  // whose extents are recovered from the planar terms) measured as 2 a sin(b/2).
  const auto seg = [](double w, double h) { return 2.0 * deg_to_rad(w) * std::sin(deg_to_rad(h) / 2.0); };
  const auto g = as_terms(bg);
  const auto d = as_terms(bd);
  double inter = 0.0;
  if (t.inter > 0.0) {
    const double dlon = wrap_lon(d.lon - g.lon);
    const double iw = std::min(g.fov_h / 2, dlon + d.fov_h / 2) - std::max(-g.fov_h / 2, dlon - d.fov_h / 2);
    const double ih = std::min(g.lat + g.fov_v / 2, d.lat + d.fov_v / 2) -
                      std::max(g.lat - g.fov_v / 2, d.lat - d.fov_v / 2);
    inter = seg(iw, ih);
  }
  const double uni = seg(g.fov_h, g.fov_v) + seg(d.fov_h, d.fov_v) - inter;
  return inter / uni;
}

double spherical_polygon_area(std::span<const Vec3> v) {
  const std::size_t n = v.size();
  if (n < 3) throw std::invalid_argument("spherical polygon needs at least 3 vertices");
  for (std::size_t i = 0; i < n; ++i) {
    if ((v[i] - v[(i + 1) % n]).norm() <= kClipEps) {
      throw std::invalid_argument("spherical polygon has consecutive duplicate vertices");
    }
  }
  double angle_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& p = v[i];
    const Vec3& prev = v[(i + n - 1) % n];
    const Vec3& next = v[(i + 1) % n];
    // Tangents at p of the arcs towards next and prev.
    const Vec3 t_next = next - p * dot(next, p);
    const Vec3 t_prev = prev - p * dot(prev, p);
    double angle = std::atan2(dot(p, cross(t_next, t_prev)), dot(t_next, t_prev));
    if (angle < 0.0) angle += 2.0 * kPi;
    angle_sum += angle;
  }
  return angle_sum - static_cast<double>(n - 2) * kPi;
}

std::vector<Vec3> intersection_polygon(const FovBBox& a, const FovBBox& b) {
  const auto corners = box_corners(a);
  std::vector<Vec3> poly(corners.begin(), corners.end());
  for (const Vec3& n : edge_normals(b)) {
    poly = clip_against(poly, n);
    drop_duplicates(poly);
    if (poly.size() < 3) return {};
  }
  return poly;
}

double exact_iou(const FovBBox& bg, const FovBBox& bd) {
  std::vector<Vec3> poly;
  try {
    poly = intersection_polygon(bg, bd);
  } catch (const DegenerateClipError&) {
    return mc_iou(bg, bd, kExactFallbackSamples, kExactFallbackSeed).iou;
  }
  const double area_g = corner_area(bg);
  const double area_d = corner_area(bd);
  double inter = poly.size() >= 3 ? spherical_polygon_area(poly) : 0.0;
  inter = std::clamp(inter, 0.0, std::min(area_g, area_d));
  return inter / (area_g + area_d - inter);
}

McEstimate mc_iou(const FovBBox& bg, const FovBBox& bd, std::size_t samples, std::uint64_t seed) {
  if (samples < 1000) throw std::invalid_argument("Monte-Carlo IoU needs at least 1000 samples");
  const BoxTester in_g(bg);
  const BoxTester in_d(bd);
  Rng rng(seed);
  std::size_t uni = 0;
  std::size_t inter = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double y = rng.uniform(-1.0, 1.0);
    const double lon = rng.uniform(-kPi, kPi);
    const double r = std::sqrt(std::max(0.0, 1.0 - y * y));
    const Vec3 p{std::sin(lon) * r, y, std::cos(lon) * r};
    const bool g = in_g(p);
    const bool d = in_d(p);
    uni += (g || d) ? 1 : 0;
    inter += (g && d) ? 1 : 0;
  }
  McEstimate est;
  est.union_hits = uni;
  est.intersection_hits = inter;
  if (uni == 0) {
    // No information from sampling. Report 0, flagging uncertainty unless the
    // boxes are disjoint by a corner test.
    bool corner_inside = false;
    for (const Vec3& c : box_corners(bg)) corner_inside = corner_inside || in_d(c);
    for (const Vec3& c : box_corners(bd)) corner_inside = corner_inside || in_g(c);
    est.iou = 0.0;
    est.std_error = corner_inside ? 0.5 : 0.0;
    return est;
  }
  est.iou = static_cast<double>(inter) / static_cast<double>(uni);
  est.std_error = std::sqrt(est.iou * (1.0 - est.iou) / static_cast<double>(uni));
  return est;
}

double iou(const FovBBox& a, const FovBBox& b, const IoUMethod& method) {
  switch (method.kind) {
    case IoUMethod::Kind::kFov: return fov_iou(a, b);
    case IoUMethod::Kind::kSph: return sph_iou(a, b);
    case IoUMethod::Kind::kExact: return exact_iou(a, b);
    case IoUMethod::Kind::kMonteCarlo: return mc_iou(a, b, method.samples, method.seed).iou;
  }
  throw std::logic_error("unhandled IoU method");
}

IoUMatrix iou_matrix(std::span<const FovBBox> a, std::span<const FovBBox> b, const IoUMethod& method,
                     unsigned threads) {
  IoUMatrix m(a.size(), b.size());
  parallel_for(a.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = 0; j < b.size(); ++j) m.at(i, j) = iou(a[i], b[j], method);
    }
  });
  return m;
}

}  // namespace sphergeo
