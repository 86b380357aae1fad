#pragma once

#include <cstddef>
#include <functional>

namespace drk {

// Thread budget: DRK_THREADS if set, else hardware concurrency; overridable.
int thread_budget();
void set_thread_budget(int n);

// Runs fn(i) for i < n over the thread budget. Each index owns its output slot,
// so results do not depend on the thread count. The first exception is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace drk
