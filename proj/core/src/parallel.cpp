#include "xlingevent/parallel.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace xlingevent {

namespace {
unsigned g_thread_limit = 0;  // 0 = hardware concurrency
}

void set_thread_limit(unsigned n) { g_thread_limit = n; }

unsigned thread_limit() {
  if (g_thread_limit > 0) return g_thread_limit;
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t workers =
      std::min<std::size_t>(thread_limit(), n);
  if (workers <= 1) {
    fn(0, n);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(begin + chunk, n);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace xlingevent
