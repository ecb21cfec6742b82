#pragma once

#include <cstdint>
#include <functional>

namespace degen {

/// Caps the number of workers used by parallel_for (0 = hardware concurrency).
void set_max_threads(unsigned count);
unsigned max_threads();

/// Runs body(i) for i in [begin, end) on up to max_threads() workers, in contiguous chunks.
/// Callers write only to per-index slots, so results do not depend on scheduling.
void parallel_for(std::int64_t begin, std::int64_t end,
                  const std::function<void(std::int64_t)>& body);

}  // namespace degen
