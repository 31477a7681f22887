#pragma once

// Deterministic parallel loop. Work items are indexed and write only to
// their own slot, so results do not depend on the worker count. The count
// is taken from SYMHORN_WORKERS (default: hardware concurrency, capped).

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace symhorn {

inline int worker_count() {
  if (const char* env = std::getenv("SYMHORN_WORKERS")) {
    const int w = std::atoi(env);
    if (w >= 1) return w;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return int(std::clamp(hc, 1u, 8u));
}

template <typename Fn>
void parallel_for(int count, Fn&& fn) {
  const int workers = std::min(worker_count(), std::max(count, 1));
  if (workers <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace symhorn
