#pragma once

#include <cstddef>
#include <functional>

namespace cooproute {

/// Worker count: `requested` if nonzero, else COOPROUTE_THREADS if set to a
/// positive integer, else the hardware concurrency (at least 1).
unsigned resolve_threads(unsigned requested);

/// Calls fn(i) for every i in [0, count) on up to `threads` workers. The first
/// exception thrown by any call is rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace cooproute
