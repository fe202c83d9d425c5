#pragma once

#include <cstddef>
#include <functional>

namespace pvo {

/// Worker count: hardware concurrency, capped by the PVO_THREADS environment
/// variable when it holds a positive integer.
std::size_t worker_count();

/// Calls body(i) for i in [0, count). Each index is visited exactly once;
/// callers write results by index so the outcome does not depend on
/// scheduling. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace pvo
