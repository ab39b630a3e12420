#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>

#include "starsim/observation.hpp"

namespace starsim {

inline constexpr std::uint64_t kMinLeakageSamples = 1024;

class InsufficientTrials : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct LeakageScore {
  /// Plug-in mutual information between row and per-trial extreme column.
  double bits = 0.0;
  /// Mean + 4 standard deviations of the score under row-label permutation.
  double noise_floor = 0.0;
  std::uint64_t samples = 0;

  bool above_floor() const noexcept { return bits > noise_floor; }
};

double plugin_mutual_information(std::span<const std::pair<std::uint32_t, std::uint32_t>> samples);

/// Throws InsufficientTrials below kMinLeakageSamples trials.
LeakageScore leakage_score(const ObservationMatrix& m, unsigned permutations = 64, std::uint64_t seed = 0x5eed);

}  // namespace starsim
