#pragma once

#include <cstddef>
#include <functional>

namespace tmsq {

// Worker count from the TMSQ_WORKERS environment variable, else the hardware
// concurrency (at least 1).
int worker_count();

// Calls fn(i) for i in [0, n) on up to `workers` threads (0 = worker_count()).
// Each index runs exactly once; callers write results into slot i so the
// output order never depends on scheduling. The first exception is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, int workers = 0);

}  // namespace tmsq
