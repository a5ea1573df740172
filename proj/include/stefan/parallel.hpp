#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace stefan {

/// Fixed chunk width for reductions. Partial sums are formed per chunk in path
/// order and then combined pairwise, so the result never depends on the
/// number of workers.
inline constexpr std::size_t kReductionChunk = 4096;

/// Runs fn(chunk_index, begin, end) over [0, n) split into chunks of `chunk`
/// items. Chunks are claimed dynamically; fn must only write chunk-local state.
template <class Fn>
void parallel_chunks(std::size_t n, std::size_t chunk, unsigned workers, Fn&& fn) {
  if (n == 0) return;
  chunk = std::max<std::size_t>(chunk, 1);
  const std::size_t n_chunks = (n + chunk - 1) / chunk;
  auto run_chunk = [&](std::size_t c) {
    const std::size_t begin = c * chunk;
    fn(c, begin, std::min(n, begin + chunk));
  };
  if (workers <= 1 || n_chunks == 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      try {
        run_chunk(c);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n_chunks);
        return;
      }
    }
  };
  const unsigned n_threads = static_cast<unsigned>(std::min<std::size_t>(workers, n_chunks));
  std::vector<std::thread> threads;
  threads.reserve(n_threads - 1);
  for (unsigned i = 1; i < n_threads; ++i) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

/// Pairwise (tree) summation in index order.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

}  // namespace stefan
