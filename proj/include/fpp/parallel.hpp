#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace fpp {

/// 0 means "all available cores".
inline unsigned resolve_workers(int requested) {
  if (requested > 0) return static_cast<unsigned>(requested);
  return std::max(1U, std::thread::hardware_concurrency());
}

/// Splits [0, total) into fixed chunks of `chunk` items and calls
/// fn(chunk_index, first, last) for each, on up to `workers` threads. The
/// chunk layout depends only on (total, chunk), so callers that store one
/// result per chunk and merge in index order are deterministic. The
/// exception from the lowest failing chunk is rethrown.
template <class Fn>
void for_each_chunk(std::uint64_t total, std::uint64_t chunk, int workers, Fn&& fn) {
  if (total == 0) return;
  chunk = std::max<std::uint64_t>(chunk, 1);
  const std::uint64_t chunks = (total + chunk - 1) / chunk;
  const auto threads = static_cast<std::uint64_t>(std::min<std::uint64_t>(resolve_workers(workers), chunks));
  std::atomic<std::uint64_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::uint64_t error_chunk = chunks;
  auto body = [&] {
    for (;;) {
      const std::uint64_t c = next.fetch_add(1);
      if (c >= chunks) return;
      try {
        fn(c, c * chunk, std::min(total, (c + 1) * chunk));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (c < error_chunk) {
          error_chunk = c;
          error = std::current_exception();
        }
      }
    }
  };
  if (threads <= 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::uint64_t t = 0; t < threads; ++t) pool.emplace_back(body);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace fpp
