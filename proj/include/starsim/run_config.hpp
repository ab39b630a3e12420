#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "starsim/hierarchy.hpp"
#include "starsim/observation.hpp"

namespace starsim {

/// Front-end settings shared by every subcommand.
struct RunConfig {
  std::string model = "sa-lru";
  /// NEWS extra index bits; rejected for the other models. Defaults to 4 for NEWS.
  std::optional<unsigned> k;
  std::uint32_t l1_hit_cycles = 1;
  std::uint32_t l2_hit_cycles = 8;
  std::uint32_t memory_cycles = 100;
  std::uint32_t l1_ways = 2;
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> trials;
  std::string out;
  double noise_sigma = 0.0;
  double threshold = 5.0;

  static constexpr unsigned kDefaultNewsK = 4;

  /// Throws ConfigError.
  HierarchyConfig hierarchy() const;
  unsigned effective_k() const;
  ConfigEcho echo() const;
};

}  // namespace starsim
