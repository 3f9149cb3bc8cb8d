#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace typent {

/// Samples per RNG sub-stream. Part of the determinism contract: changing it
/// changes every Monte Carlo result for a given seed.
inline constexpr std::size_t kChunkSize = 256;

struct Chunk {
  std::size_t index;
  std::size_t begin;
  std::size_t end;
};

inline std::size_t chunk_count(std::size_t n_items, std::size_t chunk_size = kChunkSize) {
  return (n_items + chunk_size - 1) / chunk_size;
}

/// Runs fn(Chunk) for every chunk of [0, n_items). Chunk boundaries depend only
/// on n_items, never on the thread count, so per-chunk results combined in
/// chunk order are identical for any `threads`.
template <typename Fn>
void for_each_chunk(std::size_t n_items, std::size_t threads, Fn&& fn,
                    std::size_t chunk_size = kChunkSize) {
  const std::size_t chunks = chunk_count(n_items, chunk_size);
  auto run = [&](std::size_t c) {
    fn(Chunk{c, c * chunk_size, std::min(n_items, (c + 1) * chunk_size)});
  };
  threads = std::max<std::size_t>(1, std::min(threads, chunks));
  if (threads == 1) {
    for (std::size_t c = 0; c < chunks; ++c) run(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t c = next++; c < chunks; c = next++) {
        try {
          run(c);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace typent
