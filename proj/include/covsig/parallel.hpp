#pragma once

#include <cstddef>
#include <functional>

namespace covsig {

//! Worker count from COVSIG_THREADS, else the hardware concurrency.
int default_thread_count();

//! Runs body(i) for i in [0, count) on up to `threads` workers. Each index
//! runs exactly once; if any call throws, the exception from the smallest
//! failing index is rethrown after all workers finish.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& body);

} // namespace covsig
