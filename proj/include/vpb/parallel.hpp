#pragma once

#include <cstddef>
#include <functional>

namespace vpb {

// Worker count: VPB_THREADS if set, else hardware concurrency.
unsigned worker_count();

// Runs fn(i) for i in [0, n). Work items write to disjoint output slots,
// so results do not depend on scheduling order.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace vpb
