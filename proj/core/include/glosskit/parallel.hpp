#pragma once

#include <cstddef>
#include <functional>

namespace glosskit {

// Runs fn(begin, end) over contiguous index chunks on `workers` threads.
// Each index is processed by exactly one worker and results must be written
// to per-index slots, so the outcome does not depend on the worker count.
// workers <= 1 runs inline.
void parallel_for(size_t n, int workers,
                  const std::function<void(size_t, size_t)>& fn);

}  // namespace glosskit
