// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <condition_variable>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace univrse {

/// Evaluates fn(0..n-1) on up to `workers` threads; results keep index order.
/// The first exception (lowest index) is rethrown after all workers finish.
template <typename Fn>
auto parallel_map(std::size_t n, std::size_t workers, Fn&& fn) {
  using T = decltype(fn(std::size_t{0}));
  std::vector<std::optional<T>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto body = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    body();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

/// Caps the number of concurrently held permits.
class ConcurrencyLimiter {
 public:
  explicit ConcurrencyLimiter(std::size_t cap) : cap_(std::max<std::size_t>(cap, 1)) {}

  class Permit {
   public:
    explicit Permit(ConcurrencyLimiter& owner) : owner_(owner) { owner_.acquire(); }
    ~Permit() { owner_.release(); }
    Permit(const Permit&) = delete;
    Permit& operator=(const Permit&) = delete;

   private:
    ConcurrencyLimiter& owner_;
  };

  std::size_t cap() const noexcept { return cap_; }

 private:
  void acquire();
  void release();

  std::size_t cap_;
  std::size_t held_ = 0;
  std::mutex mu_;
  std::condition_variable cv_;
};

inline void ConcurrencyLimiter::acquire() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return held_ < cap_; });
  ++held_;
}

inline void ConcurrencyLimiter::release() {
  {
    std::lock_guard lock(mu_);
    --held_;
  }
  cv_.notify_one();
}

}  // namespace univrse
