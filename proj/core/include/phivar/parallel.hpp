#pragma once

#include <cstddef>
#include <functional>

namespace phivar {

// Worker count: explicit request if > 0, else PHIVAR_THREADS, else the
// hardware concurrency (at least 1).
unsigned resolve_threads(unsigned requested = 0);

// Runs task(block) for every block in [0, blocks) on up to `threads`
// workers. Blocks are claimed dynamically; callers store per-block results
// and reduce them in block order, which makes the final value independent
// of the thread count. The first exception thrown by a task is rethrown
// after all workers have stopped.
void for_each_block(std::size_t blocks, unsigned threads,
                    const std::function<void(std::size_t)>& task);

}  // namespace phivar
