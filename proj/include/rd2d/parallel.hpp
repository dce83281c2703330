#pragma once

#include <cstddef>
#include <functional>

namespace rd2d {

/// Worker count: RD2D_THREADS when set, otherwise hardware concurrency.
int default_thread_count();

/// Runs body(i) for i in [0, count). threads <= 0 picks the default count.
/// Each index writes only its own output slot, so results are independent of
/// scheduling; the first exception thrown by any worker is rethrown.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace rd2d
