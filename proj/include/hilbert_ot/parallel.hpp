#pragma once

#include <cstddef>
#include <functional>

namespace hilbert_ot {

/// Worker count used when a caller passes threads == 0.
std::size_t default_threads();
void set_default_threads(std::size_t threads);

/// Runs body(i) for i in [0, count) on up to `threads` workers.
/// Each index is processed exactly once; callers write results into
/// index-addressed slots so the outcome does not depend on scheduling.
/// The first exception thrown by any body is rethrown on the calling thread.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace hilbert_ot
