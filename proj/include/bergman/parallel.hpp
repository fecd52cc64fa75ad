#pragma once

#include <cstddef>
#include <functional>

namespace bergman {

/// Worker count from BERGMAN_WORKERS, defaulting to the hardware concurrency.
int worker_count();

/// Runs task(i) for i in [0, count). Tasks must be independent; callers
/// store results by index so the outcome does not depend on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& task);

} // namespace bergman
