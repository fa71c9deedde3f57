#pragma once

#include <functional>

namespace nbm {

/// Worker count actually used: `requested` if positive, otherwise the
/// hardware concurrency; either way capped by the NBM_THREADS environment
/// variable when it is set to a positive integer.
int resolve_threads(int requested = 0);

/// Run body(i) for i in [0, count) across `threads` workers.  Indices are
/// dealt in fixed contiguous slices, each index is processed exactly once,
/// and the call returns when all workers finish; any exception from a body
/// is rethrown.  Bodies must only write to per-index state, which makes
/// results independent of the schedule.
void parallel_for(int count, int threads, const std::function<void(int)>& body);

} // namespace nbm
