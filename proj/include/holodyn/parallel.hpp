#pragma once

#include <cstdlib>
#include <thread>
#include <vector>

#include <Eigen/Core>

namespace holodyn {

// Worker cap: HOLODYN_THREADS, default 1.  Results are written by index, so
// the outcome does not depend on the worker count.
inline int worker_count() {
  if (const char* env = std::getenv("HOLODYN_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

template <typename Fn>
void parallel_for(Eigen::Index n, Fn&& fn) {
  const int workers = std::min<Eigen::Index>(worker_count(), std::max<Eigen::Index>(n, 1));
  if (workers <= 1) {
    for (Eigen::Index k = 0; k < n; ++k) fn(k);
    return;
  }
  std::vector<std::thread> pool;
  const Eigen::Index chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const Eigen::Index lo = w * chunk;
    const Eigen::Index hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (Eigen::Index k = lo; k < hi; ++k) fn(k);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace holodyn
