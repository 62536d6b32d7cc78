#pragma once

#include <cstddef>
#include <functional>

namespace talbot {

// Process-wide cap on worker threads used by the sweeps (default 1).
void set_worker_count(unsigned n);
unsigned worker_count();

// Calls body(i) for i in [0, n) on up to worker_count() threads. Each index is
// visited exactly once; callers write results by index, so output order never
// depends on scheduling. The first worker exception is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace talbot
