#pragma once

#include <cstddef>
#include <functional>

namespace lamarck {

/// Number of hardware threads, at least 1.
std::size_t default_parallelism();

/// Runs body(i) for i in [0, n) on up to `degree` threads. Work items must not
/// share mutable state. The first exception thrown by any item is rethrown
/// after all threads have joined.
void parallel_for(std::size_t n, std::size_t degree,
                  const std::function<void(std::size_t)>& body);

}  // namespace lamarck
