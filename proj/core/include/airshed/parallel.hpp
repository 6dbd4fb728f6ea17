#pragma once

#include <cstddef>
#include <functional>

namespace airshed {

/// Worker cap from AIRSHED_THREADS, else hardware concurrency (at least 1).
std::size_t default_thread_count();

/// Runs body(begin, end) over contiguous chunks of [0, n). Chunks are disjoint,
/// so results written per index are identical for any thread count.
/// threads == 0 means default_thread_count().
void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace airshed
