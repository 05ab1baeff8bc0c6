#pragma once

#include <cstddef>
#include <functional>

namespace tomolab {

/// Worker count: TOMOLAB_THREADS if set (>= 1), else the hardware concurrency.
std::size_t thread_count();

/// Calls body(begin, end) over disjoint chunks of [0, n). Chunks are fixed by
/// (n, thread_count()) alone, and callers only write per-index outputs, so the
/// result does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 256);

}  // namespace tomolab
