#pragma once

#include <cstddef>
#include <functional>

namespace vdk {

/// Worker count: VDK_THREADS when set (deterministic mode uses 1), otherwise
/// the hardware concurrency.
int threadCount();

/// Runs body(i) for i in [begin, end) split into contiguous chunks. Each index
/// is visited exactly once; callers must write disjoint outputs per index.
void parallelFor(std::size_t begin, std::size_t end, const std::function<void(std::size_t)>& body);

}  // namespace vdk
