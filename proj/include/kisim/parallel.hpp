#pragma once

#include <cstddef>
#include <functional>

namespace kisim {

// Worker-thread count resolved from the KISIM_THREADS environment variable.
// Unset, empty, or "0" means auto (hardware concurrency). Always >= 1.
int thread_count();

// Splits [0, n) into ranges whose sizes are multiples of `grain` (except
// possibly the last) and runs fn(begin, end) on each, using up to
// thread_count() workers. Ranges are disjoint, so kernels that touch only
// their own range produce results identical to a sequential run.
void parallel_for(std::size_t n, std::size_t grain,
                  const std::function<void(std::size_t, std::size_t)>& fn);

// Runs fn(i) for i in [0, count), distributing indices across workers.
// Callers must write results into per-index slots; combination order is
// then up to the caller, keeping reductions deterministic.
void parallel_for_index(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace kisim
