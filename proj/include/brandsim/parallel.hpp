#pragma once

#include <cstddef>
#include <functional>

namespace brandsim {

/// Worker cap: BRANDSIM_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
std::size_t worker_count();

/// Runs body(i) for i in [0, n). Each index is processed exactly once; callers
/// write results into preallocated slots so output does not depend on
/// scheduling. Exceptions from any worker are rethrown (the lowest index wins).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace brandsim
