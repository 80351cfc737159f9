#pragma once

#include <cstddef>
#include <functional>

namespace proctensor {

// Worker count from PROCTENSOR_THREADS, else the hardware concurrency.
unsigned thread_count();

// Runs body(i) for i in [0, n). Each index is handled by exactly one worker,
// so callers writing to slot i of a preallocated buffer get results that do
// not depend on the number of threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace proctensor
