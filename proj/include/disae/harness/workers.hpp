#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace disae::harness {

// 0 means "one per hardware thread".
int resolve_workers(int requested);

// Runs job(i) for every i in [0, n) on up to `workers` threads. Results must
// be written to per-index slots so the outcome does not depend on scheduling.
// The exception of the lowest failing index is rethrown after all threads join.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& job);

}  // namespace disae::harness
