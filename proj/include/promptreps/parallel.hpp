#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace promptreps {

/// Worker count from PROMPTREPS_THREADS, else hardware concurrency.
inline std::size_t thread_count() {
  if (const char* env = std::getenv("PROMPTREPS_THREADS")) {
    try {
      long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (...) {
    }
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Runs fn(begin, end) over contiguous blocks of [0, n). Blocks are disjoint,
/// so results written per index do not depend on scheduling.
template <typename Fn>
void parallel_blocks(std::size_t n, std::size_t min_block, Fn&& fn) {
  std::size_t workers = std::min(thread_count(), std::max<std::size_t>(1, n / std::max<std::size_t>(1, min_block)));
  if (workers <= 1) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::size_t per = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t b = w * per, e = std::min(n, b + per);
    if (b >= e) break;
    pool.emplace_back([&fn, b, e] { fn(b, e); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace promptreps
