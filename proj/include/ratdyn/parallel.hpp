#pragma once

#include <cstddef>
#include <functional>

namespace ratdyn {

// Worker cap for parallel_for. Zero means std::thread::hardware_concurrency.
void set_max_threads(unsigned threads);
unsigned max_threads();

// Runs body(i) for i in [0, n). Work items are independent and write to
// their own slots, so results never depend on the thread count. Nested calls
// run serially inside the calling worker. The first exception thrown by any
// item is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// Deterministic 64-bit seed derivation (splitmix64 of seed and stream).
unsigned long long split_seed(unsigned long long seed, unsigned long long stream);

}  // namespace ratdyn
