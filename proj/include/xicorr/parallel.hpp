#pragma once

#include <cstddef>
#include <functional>

namespace xicorr {

/// Threads used when a caller passes 0: std::thread::hardware_concurrency(), at least 1.
unsigned default_threads() noexcept;

/// Calls body(i) for every i in [0, count), spread over `threads` workers.
/// Indices are claimed dynamically, so callers must write results by index
/// to stay independent of scheduling. The first exception thrown by any
/// worker is rethrown on the calling thread.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace xicorr
