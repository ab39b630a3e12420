#pragma once

#include <cstdint>
#include <limits>

namespace starsim {

/// xoshiro256** (Blackman & Vigna), state expanded from a 64-bit seed with
/// splitmix64. Every random decision in the simulator comes from one of
/// these, so equal seeds reproduce runs bit for bit.
///
/// splitmix64:  z += 0x9e3779b97f4a7c15;
///              z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9;
///              z = (z ^ (z >> 27)) * 0x94d049bb133111eb;  return z ^ (z >> 31)
/// xoshiro256**: result = rotl(s1 * 5, 7) * 9; t = s1 << 17;
///              s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3; s2 ^= t; s3 = rotl(s3, 45)
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next() noexcept;

  /// Uniform integer in [0, n). n == 0 is a contract violation
  /// (throws std::invalid_argument).
  std::uint64_t choose(std::uint64_t n);

  /// Uniform double in [0, 1).
  double uniform01() noexcept;

  bool bernoulli(double p) noexcept { return uniform01() < p; }

  /// Independent child stream, e.g. one per trial or per secret value.
  Rng fork(std::uint64_t stream) const noexcept;

  // UniformRandomBitGenerator interface for <random> distributions.
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
  result_type operator()() noexcept { return next(); }

 private:
  std::uint64_t seed_;
  std::uint64_t s_[4];
};

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

}  // namespace starsim
