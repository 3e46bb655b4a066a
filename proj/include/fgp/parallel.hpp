#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace fgp {

inline int worker_count() {
  int n = int(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  if (const char* env = std::getenv("FGP_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1 && cap < n) n = cap;
  }
  return n;
}

// Contiguous-chunk parallel loop. Work items must not depend on scheduling;
// all fgp samplers key their RNG by item index, so the split is invisible.
inline void parallel_for(int count, const std::function<void(int)>& body) {
  const int workers = std::min(worker_count(), count > 0 ? count : 1);
  if (workers <= 1 || count < 2) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    const int lo = int(std::int64_t(count) * w / workers);
    const int hi = int(std::int64_t(count) * (w + 1) / workers);
    pool.emplace_back([lo, hi, &body] {
      for (int i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace fgp
