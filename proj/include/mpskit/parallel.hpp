#pragma once

#include <cstddef>
#include <functional>

namespace mpskit {

// Worker count: min(hardware_concurrency, MPSKIT_THREADS if set). At least 1.
std::size_t thread_count();

// Runs fn(i) for i in [0, total). Work is chunked across threads; fn must be
// safe to call concurrently for distinct i and should write results into
// per-index slots so the outcome is independent of the worker count.
void parallel_for(std::size_t total, const std::function<void(std::size_t)>& fn);

}  // namespace mpskit
