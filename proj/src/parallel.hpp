#pragma once

#include <cstdint>
#include <functional>

namespace kle {

/// Upper bound on worker threads used by the library (default: hardware
/// concurrency). Values below 1 reset to the default.
void set_max_threads(int threads) noexcept;
int max_threads() noexcept;

/// Runs fn(begin, end) over contiguous chunks of [begin, end), possibly on
/// several threads. Chunk boundaries are deterministic only in the sense that
/// each index is processed exactly once; callers must not depend on chunking.
void parallel_for(std::int64_t begin, std::int64_t end,
                  const std::function<void(std::int64_t, std::int64_t)>& fn);

}  // namespace kle
