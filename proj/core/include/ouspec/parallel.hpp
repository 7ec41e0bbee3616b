#pragma once

#include <cstddef>
#include <functional>

namespace ouspec {

/// Number of worker threads for a request: `requested` if positive, else all
/// hardware threads (at least 1).
int resolve_threads(int requested);

/// Size of the fixed work blocks handed to threads. Reductions that keep one
/// partial per block and combine them in block order are bitwise independent
/// of the thread count.
inline constexpr std::size_t kParallelBlock = 1024;

/// Runs body(begin, end, block_index) over [0, n) split into kParallelBlock
/// sized blocks, block k covering [k*block, min(n, (k+1)*block)). Blocks are
/// claimed dynamically; an exception in any block is rethrown on the caller.
void parallel_blocks(std::size_t n, int threads,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

/// Runs body(i) for each i in [0, n), one item per claim. For coarse
/// independent items (optimizer restarts, repetitions) that each write their
/// own result slot.
void parallel_for_each(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace ouspec
