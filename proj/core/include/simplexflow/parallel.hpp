#pragma once

#include <cstddef>
#include <functional>

namespace simplexflow {

// Process-wide worker count used by the pairwise loops and the multistart
// driver. 1 means strictly serial execution.
void set_thread_count(int threads);
int thread_count();

// Reads SIMPLEXFLOW_THREADS; returns `fallback` when unset or malformed.
int thread_count_from_env(int fallback = 1);

// Runs body(i) for i in [begin, end). Each index is processed exactly once and
// by exactly one worker, so per-index results do not depend on the schedule.
// Calls made from inside a worker run serially.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& body);

}  // namespace simplexflow
