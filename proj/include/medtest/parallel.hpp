#pragma once

#include <cstddef>
#include <functional>

namespace medtest {

/// Worker count used when a call passes threads = 0. Initialized from the
/// MEDTEST_THREADS environment variable, else the hardware concurrency.
std::size_t default_threads();
void set_default_threads(std::size_t threads);

/// Runs body(i) for i in [0, n). Each index is handled exactly once, so
/// results written by index are independent of scheduling. The first
/// exception thrown by any worker is rethrown on the caller's thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t threads = 0);

}  // namespace medtest
