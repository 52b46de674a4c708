#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace fput {

/// Number of worker threads to use; honors FPUT_THREADS if set.
int default_threads();

/// Static block partition of [0, n); fn(i) must be safe to run concurrently
/// for distinct i. Output written per-index stays deterministic regardless of
/// the schedule.
void parallel_for(long n, const std::function<void(long)>& fn, int nthreads = 0);

}  // namespace fput
