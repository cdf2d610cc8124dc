#pragma once

#include <cstddef>
#include <functional>

namespace srlproj {

// Calls fn(k) for every k in [0, chunks) on up to `workers` threads. Each
// chunk index is visited exactly once; callers write results into per-chunk
// slots and reduce them in index order, which keeps floating-point sums
// independent of the worker count. The first exception thrown is rethrown.
void parallel_for(std::size_t chunks, unsigned workers, const std::function<void(std::size_t)>& fn);

// Worker count to use when the caller passes 0.
unsigned default_workers();

}  // namespace srlproj
