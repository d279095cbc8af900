#ifndef GRAINSIZE_TOOLS_WORKER_POOL_HPP
#define GRAINSIZE_TOOLS_WORKER_POOL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace cli {

/// Calls fn(i) for i in [0, n) on up to `jobs` threads. fn must not throw.
template <typename Fn>
void for_each_index(std::size_t n, int jobs, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
}

}  // namespace cli

#endif  // GRAINSIZE_TOOLS_WORKER_POOL_HPP
