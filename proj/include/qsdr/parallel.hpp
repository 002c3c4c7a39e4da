#pragma once

#include <functional>

namespace qsdr {

// Runs fn(i) for i in [0, count) on up to `threads` workers. Work items must
// write to disjoint slots; results are then independent of scheduling. The
// first exception thrown by any item is rethrown after all workers join.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace qsdr
