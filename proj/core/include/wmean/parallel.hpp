#pragma once

#include <cstddef>
#include <functional>

namespace wmean {

/// Worker count used by parallel_for. Defaults to 1; values < 1 are clamped.
void set_thread_count(int n);
int thread_count();

/// Calls body(i) for every i in [0, count), splitting the range into
/// contiguous blocks over thread_count() threads. Callers write results into
/// per-index slots and reduce them in index order afterwards, which keeps
/// every result independent of the thread count. The first exception thrown
/// by any body is rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace wmean
