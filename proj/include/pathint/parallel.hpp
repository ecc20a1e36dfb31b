#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace pathint {

/// Worker cap for trace loops. 0 means "use the hardware concurrency".
struct Parallel {
  unsigned threads = 0;

  unsigned resolved() const {
    if (threads != 0) return threads;
    return std::max(1u, std::thread::hardware_concurrency());
  }
};

/// Sums fn(begin, end) over [0, n) split into a fixed number of chunks.
///
/// Chunk boundaries do not depend on the thread count and partial results are
/// combined in chunk order, so the result is bitwise reproducible for any cap.
template <typename T, typename Fn>
T parallel_sum(std::size_t n, const Parallel& par, Fn&& fn) {
  constexpr std::size_t kChunks = 64;
  if (n == 0) return T{};
  const std::size_t chunks = std::min(n, kChunks);
  std::vector<T> partial(chunks, T{});
  auto bounds = [&](std::size_t c) {
    return std::pair{n * c / chunks, n * (c + 1) / chunks};
  };
  const unsigned workers = std::min<unsigned>(par.resolved(), static_cast<unsigned>(chunks));
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) {
      auto [b, e] = bounds(c);
      partial[c] = fn(b, e);
    }
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t c = w; c < chunks; c += workers) {
          auto [b, e] = bounds(c);
          partial[c] = fn(b, e);
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  T total{};
  for (const auto& p : partial) total += p;
  return total;
}

/// Runs fn(i) for i in [0, n); callers must write to disjoint outputs.
template <typename Fn>
void parallel_for(std::size_t n, const Parallel& par, Fn&& fn) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(par.resolved(), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace pathint
