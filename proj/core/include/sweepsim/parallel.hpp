// =============================================================================
// parallel.hpp — replicate-parallel work distribution.
//
// Replicates are independent; workers pull indices from a shared atomic
// counter (simple work stealing).  Each task writes only to its own output
// slot, so results are identical for any worker count.
// =============================================================================
#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace sweepsim {

/// Calls fn(i) for i in [0, count), spread over `workers` threads.
/// fn must only touch state owned by index i.
template <class Fn>
void parallel_for_indexed(std::int64_t count, int workers, Fn&& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::int64_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

}  // namespace sweepsim
