#ifndef SLOWFAST_PARALLEL_H_
#define SLOWFAST_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace slowfast {

// Worker count from SLOWFAST_THREADS, falling back to the hardware
// concurrency. Always >= 1.
std::size_t thread_count();

// Runs fn(i) for i in [0, n). Each index is visited exactly once; callers
// write results into per-index slots so the output never depends on the
// number of threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  std::size_t threads = thread_count());

}  // namespace slowfast

#endif  // SLOWFAST_PARALLEL_H_
