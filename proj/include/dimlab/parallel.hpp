#pragma once

#include <cstddef>
#include <functional>

namespace dimlab {

// Worker count used by parallel_for. Initialised from DIMLAB_THREADS, falling
// back to the hardware concurrency.
int thread_count();
void set_thread_count(int n);

// Runs body(i) for i in [0, n). Chunks are static, so any reduction the
// caller performs over per-index slots is independent of scheduling. Nested
// calls run serially on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// RAII override of the thread count, restored on destruction.
class ScopedThreadCount {
 public:
  explicit ScopedThreadCount(int n) : previous_(thread_count()) { set_thread_count(n); }
  ~ScopedThreadCount() { set_thread_count(previous_); }
  ScopedThreadCount(const ScopedThreadCount&) = delete;
  ScopedThreadCount& operator=(const ScopedThreadCount&) = delete;

 private:
  int previous_;
};

}  // namespace dimlab
