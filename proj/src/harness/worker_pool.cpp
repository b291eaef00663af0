#include "rmt/harness/worker_pool.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "rmt/error.hpp"

namespace rmt::harness {

std::size_t threads_from_env() {
  const char* raw = std::getenv("RMT_THREADS");
  if (raw == nullptr || *raw == '\0') {
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
  }
  const std::string text(raw);
  std::size_t pos = 0;
  long long value = 0;
  try {
    value = std::stoll(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != text.size() || value < 1) {
    throw InvalidSpec("RMT_THREADS must be a positive integer, got '" + text + "'");
  }
  return static_cast<std::size_t>(value);
}

WorkerPool::WorkerPool(std::size_t threads) : threads_(std::max<std::size_t>(1, threads)) {}

void WorkerPool::parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) const {
  const std::size_t workers = std::min(threads_, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

ParallelFor WorkerPool::executor() const {
  return [this](std::size_t n, const std::function<void(std::size_t)>& body) { parallel_for(n, body); };
}

}  // namespace rmt::harness
