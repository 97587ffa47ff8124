#pragma once

#include <cstdint>
#include <span>
#include <utility>

namespace fundus {

/// SplitMix64 generator; used only to expand a user seed into PCG32 state.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// PCG32 (XSH-RR 64/32). All randomness in the project flows through this
/// generator so that models and splits are reproducible bit for bit.
class Pcg32 {
 public:
  using result_type = std::uint32_t;

  constexpr Pcg32(std::uint64_t init_state, std::uint64_t init_seq) noexcept
      : inc_((init_seq << 1u) | 1u) {
    next();
    state_ += init_state;
    next();
  }

  /// Independent stream for (seed, stream). Tree t of a forest uses stream t.
  static constexpr Pcg32 derive(std::uint64_t seed, std::uint64_t stream) noexcept {
    SplitMix64 mix(seed);
    const std::uint64_t init_state = mix.next();
    const std::uint64_t init_seq = mix.next() ^ SplitMix64(stream).next();
    return Pcg32(init_state, init_seq);
  }

  constexpr std::uint32_t next() noexcept {
    const std::uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    const auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    const auto rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((-rot) & 31u));
  }

  constexpr std::uint32_t operator()() noexcept { return next(); }
  static constexpr std::uint32_t min() noexcept { return 0; }
  static constexpr std::uint32_t max() noexcept { return 0xFFFFFFFFu; }

  /// Uniform integer in [0, bound) without modulo bias. bound must be > 0.
  constexpr std::uint32_t bounded(std::uint32_t bound) noexcept {
    const std::uint32_t threshold = (0u - bound) % bound;
    for (;;) {
      const std::uint32_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  /// Uniform double in [0, 1) with 53 bits of resolution.
  constexpr double uniform() noexcept {
    const std::uint64_t hi = next() >> 5u;  // 27 bits
    const std::uint64_t lo = next() >> 6u;  // 26 bits
    return static_cast<double>((hi << 26u) | lo) * (1.0 / 9007199254740992.0);
  }

 private:
  std::uint64_t state_ = 0;
  std::uint64_t inc_;
};

/// Fisher-Yates shuffle driven by Pcg32::bounded. std::shuffle is not used
/// because its draw sequence is library-specific.
template <typename T>
void shuffle(std::span<T> items, Pcg32& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = rng.bounded(static_cast<std::uint32_t>(i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace fundus
