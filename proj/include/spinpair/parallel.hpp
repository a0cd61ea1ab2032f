#pragma once

#include <cstddef>
#include <functional>

namespace spinpair {

// Worker count: SPINPAIR_THREADS if set (>= 1), else hardware concurrency.
unsigned thread_budget();

// Calls body(i) for i in [0, n); iterations must be independent.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace spinpair
