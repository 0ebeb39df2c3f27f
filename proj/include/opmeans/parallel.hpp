#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace opmeans {

// Worker cap for data-parallel loops: the OPMEANS_THREADS environment
// variable if set (and sane), otherwise the hardware concurrency.  Mutable
// so a front end can apply a --threads flag.
inline int& thread_budget() {
  static int budget = [] {
    if (const char* env = std::getenv("OPMEANS_THREADS")) {
      char* end = nullptr;
      const long v = std::strtol(env, &end, 10);
      if (end != env && *end == '\0' && v >= 1 && v <= 1024) return static_cast<int>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
  }();
  return budget;
}

// Static block partition of [0, n) over at most thread_budget() workers.
// Every index writes only its own outputs, so results are identical for any
// worker count.  The first exception thrown by a worker is rethrown.
template <class Fn>
void parallel_for(size_t n, Fn&& fn) {
  const size_t workers =
      std::min<size_t>(static_cast<size_t>(std::max(1, thread_budget())), n);
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr firstError;
  std::mutex errorMutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (size_t w = 0; w < workers; ++w) {
    const size_t begin = n * w / workers;
    const size_t end = n * (w + 1) / workers;
    pool.emplace_back([&, begin, end] {
      try {
        for (size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(errorMutex);
        if (!firstError) firstError = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (firstError) std::rethrow_exception(firstError);
}

}  // namespace opmeans
