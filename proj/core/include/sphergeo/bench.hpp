// SPDX-License-Identifier: Apache-2.0
//
// Timing harness for the single-pair IoU kernels. Every method sees the same
// seeded pair stream; calls are timed in blocks of kBenchBlock on a
// monotonic clock and reported per call.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sphergeo/iou.hpp"

namespace sphergeo {

inline constexpr std::size_t kBenchBlock = 100;
inline constexpr std::size_t kBenchMinCalls = 1000;

struct BenchResult {
  std::string method;
  std::size_t n_calls = 0;
  double mean_ns = 0.0;
  double p50_ns = 0.0;
  double p95_ns = 0.0;
};

using BoxPair = std::pair<FovBBox, FovBBox>;

/// Overlapping pairs: a random box and a perturbed copy of it.
std::vector<BoxPair> make_bench_pairs(std::size_t n, std::uint64_t seed);

/// FNV-1a over the bit patterns of every box field.
std::uint64_t pair_stream_checksum(std::span<const BoxPair> pairs);

/// Throws std::invalid_argument for n < kBenchMinCalls or a warmup fraction
/// outside [0, 0.5]. Methods are the kernel names fov, sph and exact.
std::vector<BenchResult> run_bench(std::span<const std::string> methods, std::size_t n, std::uint64_t seed,
                                   double warmup_fraction = 0.1);

}  // namespace sphergeo
