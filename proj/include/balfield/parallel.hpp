#pragma once

#include <functional>

namespace balfield {

/// Number of worker threads used by plane-parallel loops. Defaults to the
/// BALANCE_FIELD_WORKERS environment variable, or 1 (sequential) when unset.
int worker_count();

/// Override the worker count for this process (0 restores the env default).
void set_worker_count(int n);

/// Runs fn(p) for p in [0, n). Work is split by plane index only, so results
/// are identical for every worker count; reductions must store per-plane
/// partials and combine them in plane order afterwards.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace balfield
