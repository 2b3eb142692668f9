#pragma once

#include <cstddef>
#include <functional>

namespace xlingevent {

/// Caps the number of worker threads used by parallel_for. 0 restores the
/// default (hardware concurrency). Set once at startup; not thread safe.
void set_thread_limit(unsigned n);
unsigned thread_limit();

// Runs fn(begin, end) over disjoint chunks of [0, n). Each index must write
// only to its own output slot, so the chunking never changes results.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace xlingevent
