#pragma once

#include <cstddef>
#include <functional>

namespace dormantwalk {

/// Worker count: min(hardware, DORMANTWALK_THREADS if set), at least 1.
std::size_t worker_count();

/// Runs fn(i) for i in [0, n) on the worker pool.  Callers own any output
/// slots indexed by i, so the result is independent of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace dormantwalk
