#pragma once

#include <cstddef>
#include <functional>

namespace rmt {

/// Runs body(i) for every i in [0, n). Implementations may run indices
/// concurrently; callers write results into per-index slots and reduce in
/// index order afterwards.
using ParallelFor = std::function<void(std::size_t n, const std::function<void(std::size_t)>& body)>;

inline void serial_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  for (std::size_t i = 0; i < n; ++i) body(i);
}

inline ParallelFor serial_executor() { return serial_for; }

}  // namespace rmt
