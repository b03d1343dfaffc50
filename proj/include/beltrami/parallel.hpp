#pragma once

#include <cstddef>
#include <functional>

namespace beltrami {

/// Worker count from BELTRAMI_THREADS, else the hardware concurrency.
int default_thread_count();

/// Resolves a user-facing thread request (<= 0 means default).
int resolve_threads(int requested);

/// Calls body(i) for i in [0, n) on up to `threads` workers. Indices are
/// handed out dynamically; callers write results into per-index slots and
/// reduce afterwards so the outcome does not depend on scheduling.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace beltrami
