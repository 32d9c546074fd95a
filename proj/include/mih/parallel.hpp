#pragma once

#include <cstddef>
#include <functional>

// Minimal deterministic work partitioner. Callers run independent items in
// parallel, writing to disjoint pre-sized slots, then merge sequentially in
// index order; results are therefore identical for any thread count.

namespace mih::parallel {

/// Caps worker threads process-wide. 0 restores the hardware default.
void set_max_threads(unsigned n);

/// Effective cap (never 0).
unsigned max_threads();

/// Invokes fn(i) for every i in [begin, end), distributing items across up
/// to max_threads() workers. fn must confine its writes to per-index state.
/// The first exception thrown by any item is rethrown after all workers
/// finish.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn);

} // namespace mih::parallel
