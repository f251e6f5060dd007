#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace maxstable {

/// Identifies one reproducible random stream.
struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  /// Sub-stream used for chunk `index` of a partitioned Monte Carlo run.
  [[nodiscard]] RngSpec child(std::uint64_t index) const noexcept;

  friend bool operator==(const RngSpec&, const RngSpec&) = default;
};

[[nodiscard]] std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Philox4x32-10 counter-based generator keyed by the seed, with the stream
/// occupying the upper half of the 128-bit counter.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(RngSpec spec) noexcept;

  [[nodiscard]] static constexpr result_type min() noexcept { return 0; }
  [[nodiscard]] static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  /// Uniform on the open interval (0,1).
  double uniform() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1p-53;
  }

  /// Unit-rate exponential.
  double exponential() noexcept { return -std::log(uniform()); }

  [[nodiscard]] const RngSpec& spec() const noexcept { return spec_; }
  [[nodiscard]] std::uint64_t blocks_used() const noexcept { return counter_; }

 private:
  void refill() noexcept;

  RngSpec spec_;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int available_ = 0;
};

}  // namespace maxstable
