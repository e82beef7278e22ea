#pragma once
// Index-parallel loops. Results are written by index, so any reduction the
// caller performs afterwards is independent of scheduling.

#include <cstddef>
#include <functional>

namespace nlab {

// Worker count: NONLOCAL_LAB_THREADS if set to a positive integer, else the
// hardware concurrency (at least 1).
int worker_count();

// Runs body(i) for i in [0, count). The first exception thrown by any body is
// rethrown after all workers have joined.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace nlab
