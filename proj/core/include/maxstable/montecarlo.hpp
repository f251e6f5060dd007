#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "maxstable/rng.hpp"

namespace maxstable {

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  RngSpec rng{};
};

/// Streaming mean and variance (Welford), mergeable in a fixed order.
class Moments {
 public:
  void add(double x) noexcept {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }

  void merge(const Moments& other) noexcept {
    if (other.n_ == 0) return;
    if (n_ == 0) {
      *this = other;
      return;
    }
    const double total = static_cast<double>(n_ + other.n_);
    const double delta = other.mean_ - mean_;
    mean_ += delta * static_cast<double>(other.n_) / total;
    m2_ += other.m2_ + delta * delta * static_cast<double>(n_) * static_cast<double>(other.n_) / total;
    n_ += other.n_;
  }

  [[nodiscard]] std::size_t count() const noexcept { return n_; }
  [[nodiscard]] double mean() const noexcept { return mean_; }
  [[nodiscard]] double variance() const noexcept {
    return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
  }
  [[nodiscard]] double std_error() const noexcept {
    return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
  }

  [[nodiscard]] McEstimate estimate(RngSpec spec) const noexcept {
    return {mean_, std_error(), n_, spec};
  }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct ExecutionPolicy {
  unsigned threads = 1;
  std::size_t chunk = 4096;
};

/// Splits `n` draws into fixed-size chunks, chunk i drawing from spec.child(i).
/// `fn(rng, count, acc)` fills one accumulator per chunk; accumulators are merged
/// in chunk order, so the result does not depend on the thread count.
template <class Acc, class Fn>
Acc run_chunked(std::size_t n, RngSpec spec, Fn&& fn, const ExecutionPolicy& policy = {}) {
  const std::size_t chunk = std::max<std::size_t>(1, policy.chunk);
  const std::size_t chunks = (n + chunk - 1) / chunk;
  std::vector<Acc> partial(chunks);
  auto work = [&](std::size_t i) {
    Rng rng(spec.child(i));
    const std::size_t count = std::min(chunk, n - i * chunk);
    fn(rng, count, partial[i]);
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(policy.threads, static_cast<unsigned>(chunks)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < chunks; ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < chunks; i = next++) {
          try {
            work(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }
  Acc total{};
  for (auto& p : partial) total.merge(p);
  return total;
}

/// Mean of `draw(rng)` over n draws. Each chunk works on its own copy of `draw`,
/// so a mutable scratch buffer captured by value is not shared between threads.
template <class Draw>
McEstimate mc_mean(std::size_t n, RngSpec spec, Draw&& draw, const ExecutionPolicy& policy = {}) {
  auto acc = run_chunked<Moments>(
      n, spec,
      [&](Rng& rng, std::size_t count, Moments& m) {
        auto local = draw;
        for (std::size_t i = 0; i < count; ++i) m.add(local(rng));
      },
      policy);
  return acc.estimate(spec);
}

}  // namespace maxstable
