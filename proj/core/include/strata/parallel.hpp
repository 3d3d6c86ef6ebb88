#pragma once

#include <cstddef>
#include <functional>

namespace strata {

/// Worker count used when a caller passes 0: STRATA_THREADS if set, otherwise
/// std::thread::hardware_concurrency().
unsigned default_thread_count();

/// Runs body(i) for every i in [0, count). Items are handed out dynamically,
/// so body must only write to state owned by index i. The first exception
/// thrown by any item is rethrown after all workers have joined.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, unsigned threads = 0);

}  // namespace strata
