#pragma once

#include <cstddef>
#include <functional>

namespace rpca {

/// Thread cap for internal block parallelism. Defaults to RPCA_THREADS, or 1 when unset.
int num_threads();
void set_num_threads(int n);

/// Runs body(begin, end) over [0, count) split into contiguous chunks, one per thread.
/// Each index is visited exactly once, so results do not depend on the thread count
/// as long as body writes only to its own range.
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace rpca
