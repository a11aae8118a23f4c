#pragma once

#include <cstddef>
#include <functional>

namespace peanolab {

/// Worker count: PEANOLAB_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
std::size_t worker_count();

/// Runs body(i) for every i in [0, count) on up to worker_count() threads.
/// Work items are claimed dynamically, so body must only write to
/// per-index storage. The first exception thrown by any item is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace peanolab
