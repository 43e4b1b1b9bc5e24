// SPDX-License-Identifier: Apache-2.0
#include "sphergeo/bench.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "sphergeo/random.hpp"

namespace sphergeo {

namespace {

volatile double g_sink = 0.0;

template <class Kernel>
BenchResult time_kernel(const std::string& name, Kernel kernel, std::span<const BoxPair> pairs, std::size_t n,
                        std::size_t warmup) {
  double acc = 0.0;
  for (std::size_t i = 0; i < warmup; ++i) acc += kernel(pairs[i % pairs.size()]);

  std::vector<double> per_call;
  per_call.reserve(n / kBenchBlock + 1);
  double total_ns = 0.0;
  std::size_t done = 0;
  while (done < n) {
    const std::size_t block = std::min(kBenchBlock, n - done);
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < block; ++i) acc += kernel(pairs[done + i]);
    const auto t1 = std::chrono::steady_clock::now();
    const double ns = std::chrono::duration<double, std::nano>(t1 - t0).count();
    total_ns += ns;
    per_call.push_back(ns / static_cast<double>(block));
    done += block;
  }
  g_sink = g_sink + acc;

  std::sort(per_call.begin(), per_call.end());
  const auto quantile = [&](double q) {
    const auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(per_call.size() - 1) + 0.5));
    return per_call[idx];
  };
  BenchResult r;
  r.method = name;
  r.n_calls = n;
  r.mean_ns = total_ns / static_cast<double>(n);
  r.p50_ns = quantile(0.5);
  r.p95_ns = quantile(0.95);
  return r;
}

}  // namespace

std::vector<BoxPair> make_bench_pairs(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<BoxPair> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double lon = rng.uniform(-180.0, 180.0);
    const double lat = rng.uniform(-60.0, 60.0);
    const double fh = rng.uniform(20.0, 60.0);
    const double fv = rng.uniform(20.0, 60.0);
    const FovBBox a(lon, lat, fh, fv);
    const FovBBox b(wrap_lon(lon + rng.uniform(-10.0, 10.0)), std::clamp(lat + rng.uniform(-10.0, 10.0), -90.0, 90.0),
                    fh * rng.uniform(0.8, 1.2), fv * rng.uniform(0.8, 1.2));
    out.emplace_back(a, b);
  }
  return out;
}

std::uint64_t pair_stream_checksum(std::span<const BoxPair> pairs) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto mix = [&h](double x) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
    for (int i = 0; i < 8; ++i) {
      h ^= bits & 0xffU;
      h *= 0x100000001b3ULL;
      bits >>= 8;
    }
  };
  for (const auto& [a, b] : pairs) {
    for (const FovBBox* box : {&a, &b}) {
      mix(box->lon());
      mix(box->lat());
      mix(box->fov_h());
      mix(box->fov_v());
    }
  }
  return h;
}

std::vector<BenchResult> run_bench(std::span<const std::string> methods, std::size_t n, std::uint64_t seed,
                                   double warmup_fraction) {
  if (n < kBenchMinCalls) throw std::invalid_argument("benchmark needs at least 1000 calls");
  if (!(warmup_fraction >= 0.0 && warmup_fraction <= 0.5)) {
    throw std::invalid_argument("warmup fraction must lie in [0, 0.5]");
  }
  const std::vector<BoxPair> pairs = make_bench_pairs(n, seed);
  const auto warmup = static_cast<std::size_t>(std::ceil(warmup_fraction * static_cast<double>(n)));

  std::vector<BenchResult> out;
  for (const std::string& m : methods) {
    if (m == "fov") {
      out.push_back(time_kernel(m, [](const BoxPair& p) { return fov_iou(p.first, p.second); }, pairs, n, warmup));
    } else if (m == "sph") {
      out.push_back(time_kernel(m, [](const BoxPair& p) { return sph_iou(p.first, p.second); }, pairs, n, warmup));
    } else if (m == "exact") {
      out.push_back(time_kernel(m, [](const BoxPair& p) { return exact_iou(p.first, p.second); }, pairs, n, warmup));
    } else {
      throw std::invalid_argument("unknown benchmark method '" + m + "' (expected fov, sph or exact)");
    }
  }
  return out;
}

}  // namespace sphergeo
