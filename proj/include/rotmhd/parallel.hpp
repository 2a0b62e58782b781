// Index-parallel loops over std::thread.  Each index writes its own slot, so
// results do not depend on the thread count.
#pragma once

#include <cstddef>
#include <functional>

namespace rotmhd {

// ROTMHD_THREADS if set to a positive integer, else hardware concurrency.
int thread_count();

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace rotmhd
