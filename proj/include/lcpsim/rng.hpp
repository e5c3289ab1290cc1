#pragma once

#include <cstdint>

namespace lcpsim {

__extension__ typedef unsigned __int128 uint128_t;
__extension__ typedef __int128 int128_t;

/// Counter-based random stream keyed by (seed, replicate, step).
///
/// Every value is a pure function of (seed, replicate, step, lane), so a
/// replicate draws the same numbers regardless of how batches are scheduled.
/// `at_step` repositions the stream; successive draws within a step advance
/// the lane counter.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t replicate, std::uint64_t step = 0);

  void at_step(std::uint64_t step) noexcept {
    step_ = step;
    lane_ = 0;
  }
  std::uint64_t step() const noexcept { return step_; }

  std::uint64_t next_u64() noexcept { return draw(lane_++); }

  /// Uniform on (0, 1], 53 random bits.
  double next_unit() noexcept;

  /// Uniform integer in [0, bound) without modulo bias; bound > 0.
  uint128_t below(uint128_t bound) noexcept;

  /// Draw on a fixed lane of the current step that does not disturb next_u64().
  std::uint64_t draw(std::uint32_t lane) const noexcept;

  static constexpr std::uint32_t kHoldingTimeLane = 0x80000000u;

 private:
  std::uint64_t key_;
  std::uint64_t step_;
  std::uint32_t lane_ = 0;
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace lcpsim
