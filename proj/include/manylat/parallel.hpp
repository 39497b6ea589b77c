#pragma once

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace manylat {

// Runs fn(i) for i in [0, count). Work items must write only to their own
// slots; with counter-keyed sampling the result is schedule independent.
template <class Fn>
void parallel_for(long count, int threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<long> next{0};
  int workers = int(std::min<long>(threads, count));
  for (int t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      for (long i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace manylat
