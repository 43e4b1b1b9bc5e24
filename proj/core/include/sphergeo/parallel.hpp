// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace sphergeo {

/// Resolves a requested worker count: 0 means hardware concurrency.
unsigned resolve_threads(unsigned requested);

/// Runs body(begin, end) over contiguous blocks of [0, n). Blocks never
/// share an index, so per-index results do not depend on the worker count.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace sphergeo
