#pragma once

#include <cstddef>
#include <functional>

namespace screenopt {

// 0 or negative means "all hardware threads".
int resolve_threads(int requested);

// Calls fn(i) for i in [0, count) on up to `threads` workers. Work is handed
// out dynamically; callers write results into per-index slots so the outcome
// does not depend on scheduling. The first exception thrown is rethrown.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace screenopt
