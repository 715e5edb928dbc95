#pragma once

#include <cstdint>
#include <limits>

namespace threatnet {

// Counter-based stream derivation: every random draw in the toolkit comes from
// an engine keyed by (seed, domain, a, b), so results never depend on which
// worker thread executes a unit of work or in what order.

constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t mix_key(std::uint64_t seed, std::uint64_t domain, std::uint64_t a,
                                std::uint64_t b) noexcept {
  std::uint64_t s = seed;
  std::uint64_t h = splitmix64(s);
  s = h ^ domain;
  h = splitmix64(s);
  s = h ^ a;
  h = splitmix64(s);
  s = h ^ b;
  return splitmix64(s);
}

/// xoshiro256** engine; satisfies UniformRandomBitGenerator.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Xoshiro256(std::uint64_t seed) noexcept {
    std::uint64_t s = seed;
    for (auto& word : state_) word = splitmix64(s);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4]{};
};

/// Stream domains. Values are part of the reproducibility contract; do not renumber.
enum class Stream : std::uint64_t {
  walk = 1,
  sbm_pair = 10,
  sbm_embed = 11,
  sbm_time = 12,
  er_pair = 13,
  hmmb_lifestyle = 20,
  hmmb_membership = 21,
  hmmb_degree = 22,
  hmmb_pair = 23,
  hmmb_events = 24,
  hmmb_stamp = 25,
  trial = 30,
  cue = 31,
  validation = 40,
  eigen = 50,
  test = 99,
};

inline Xoshiro256 stream(std::uint64_t seed, Stream domain, std::uint64_t a = 0,
                         std::uint64_t b = 0) noexcept {
  return Xoshiro256(mix_key(seed, static_cast<std::uint64_t>(domain), a, b));
}

/// Child seed for a sub-computation (e.g. one Monte-Carlo trial).
inline std::uint64_t derive_seed(std::uint64_t seed, Stream domain, std::uint64_t a,
                                 std::uint64_t b = 0) noexcept {
  return mix_key(seed, static_cast<std::uint64_t>(domain), a, b);
}

}  // namespace threatnet
