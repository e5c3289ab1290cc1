#include "lcpsim/rng.hpp"

namespace lcpsim {

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t replicate, std::uint64_t step)
    : key_(mix64(mix64(seed) ^ (replicate * 0xD6E8FEB86659FD93ull))), step_(step) {}

std::uint64_t RandomStream::draw(std::uint32_t lane) const noexcept {
  const std::uint64_t counter = mix64(key_ ^ mix64(step_)) + lane * 0x9E3779B97F4A7C15ull;
  return mix64(counter ^ key_);
}

double RandomStream::next_unit() noexcept {
  return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

uint128_t RandomStream::below(uint128_t bound) noexcept {
  using u128 = uint128_t;
  if (bound <= UINT64_MAX) {
    // Lemire's multiply-shift with rejection.
    const std::uint64_t b = static_cast<std::uint64_t>(bound);
    std::uint64_t x = next_u64();
    u128 m = static_cast<u128>(x) * b;
    std::uint64_t low = static_cast<std::uint64_t>(m);
    if (low < b) {
      const std::uint64_t threshold = (0 - b) % b;
      while (low < threshold) {
        x = next_u64();
        m = static_cast<u128>(x) * b;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return m >> 64;
  }
  // Rejection on the smallest covering power of two.
  int bits = 0;
  for (u128 t = bound - 1; t; t >>= 1) ++bits;
  const u128 mask = bits >= 128 ? ~u128{0} : ((u128{1} << bits) - 1);
  for (;;) {
    const u128 x = ((static_cast<u128>(next_u64()) << 64) | next_u64()) & mask;
    if (x < bound) return x;
  }
}

}  // namespace lcpsim
