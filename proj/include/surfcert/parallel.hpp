#pragma once

#include <cstddef>
#include <functional>

namespace surfcert {

/// Worker count: BOCHNER_THREADS when set to a positive integer, else the
/// hardware concurrency (at least 1).
int thread_count();

/// Calls fn(i) for i in [0, n) across thread_count() workers. Each index is
/// visited once; callers write results to slot i so the outcome does not
/// depend on scheduling. The exception of the lowest failing index, if any,
/// is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace surfcert
