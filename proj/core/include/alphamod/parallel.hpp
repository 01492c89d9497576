#pragma once

#include <cstddef>
#include <functional>

namespace alphamod {

// Worker count: ALPHAMOD_THREADS if set, else hardware concurrency.
std::size_t thread_count();
void set_thread_count(std::size_t n);

// Calls body(begin, end) on disjoint chunks of [0, n); returns after all finish.
// Exceptions from workers are rethrown (first one wins).
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace alphamod
