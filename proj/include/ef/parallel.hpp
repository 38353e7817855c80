#pragma once

#include <functional>

namespace ef {

/// Global worker count used by parallel_for. Starts at
/// std::thread::hardware_concurrency(); the CLI sets it from --threads.
int thread_count();
void set_thread_count(int n);

/// Runs fn(begin, end) over a partition of [0, n) using up to thread_count()
/// threads (one of them the caller). Chunks are disjoint, so results are
/// independent of the thread count as long as fn writes only to its own
/// range -- every reduction in this codebase therefore happens outside
/// parallel_for, in a fixed sequential order.
void parallel_for(int n, const std::function<void(int, int)>& fn);

}  // namespace ef
