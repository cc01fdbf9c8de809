#pragma once

#include <cstddef>
#include <functional>

namespace magscatter {

/// Worker count: MAGSCATTER_THREADS if set and positive, else hardware concurrency.
int thread_count();

/// Runs body(begin, end) over disjoint chunks of [0, n). Chunk boundaries depend only on
/// n and the worker count, so reductions done per chunk are reproducible for a fixed setting.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace magscatter
