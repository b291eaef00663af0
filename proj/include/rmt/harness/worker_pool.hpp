#pragma once

#include <cstddef>
#include <functional>

#include "rmt/executor.hpp"

namespace rmt::harness {

/// Thread count from RMT_THREADS, or the hardware concurrency when unset.
/// Throws InvalidSpec when the variable is not a positive integer.
std::size_t threads_from_env();

/// Fixed-size pool of std::threads handing out indices from a shared counter.
/// Work items write to their own slots, so results do not depend on the
/// thread count.
class WorkerPool {
 public:
  explicit WorkerPool(std::size_t threads);

  [[nodiscard]] std::size_t threads() const { return threads_; }

  void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) const;

  /// Executor handle for the library modules.
  [[nodiscard]] ParallelFor executor() const;

 private:
  std::size_t threads_;
};

}  // namespace rmt::harness
