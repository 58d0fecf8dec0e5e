#pragma once

#include <cstddef>
#include <functional>

namespace sparsescan {

// Worker count used when a caller passes threads <= 0.
int default_thread_count() noexcept;

// Runs body(i) for i in [0, count) on up to `threads` workers. Work items are
// claimed dynamically; callers write results into slot i so output never
// depends on scheduling. The first exception thrown by a body is rethrown.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace sparsescan
