#ifndef TARMOS_PARALLEL_HPP
#define TARMOS_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace tarmos {

// Runs fn(0..n-1) across up to `threads` workers.  Tasks must be
// independent; callers store results by index so output never depends on
// scheduling.  threads <= 1 runs inline.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

// Thread-count resolution: explicit argument, else TARMOS_THREADS, else 1.
unsigned resolve_threads(int requested);

}  // namespace tarmos

#endif
