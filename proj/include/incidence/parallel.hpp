#pragma once

#include <cstddef>
#include <functional>

namespace incidence {

// Worker count for parallel sections, from INCIDENCE_NUM_THREADS (default:
// hardware concurrency). Always at least 1.
int worker_count();

// Runs fn(begin, end) over disjoint index blocks covering [0, n). Callers must
// write to disjoint slots only, so results never depend on the block split.
// Work smaller than grain runs inline.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn,
                  std::size_t grain = 2048);

}  // namespace incidence
