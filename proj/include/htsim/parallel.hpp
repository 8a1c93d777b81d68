#pragma once

#include <atomic>
#include <thread>
#include <vector>

namespace htsim {

// Runs fn(i) for i in [0, n) on up to `workers` threads. Callers get
// determinism from per-task seeds, not from scheduling order.
template <class Fn>
void parallel_for(long n, int workers, Fn&& fn) {
  if (workers <= 1 || n <= 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::thread> pool;
  const int count = static_cast<int>(std::min<long>(workers, n));
  pool.reserve(count);
  for (int w = 0; w < count; ++w)
    pool.emplace_back([&] {
      for (long i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace htsim
