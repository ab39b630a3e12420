#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "starsim/trace.hpp"

namespace starsim {

enum class SynthProfile : std::uint8_t { UniformRandom, PointerChase, ConflictHeavy, SpecMix };

/// "uniform-random", "pointer-chase", "conflict-heavy", "spec-mix"; throws ConfigError.
SynthProfile parse_profile(std::string_view name);
std::string_view to_string(SynthProfile p) noexcept;

struct SynthParams {
  /// Memory operations to emit (loads plus stores).
  std::uint64_t operations = 100000;
  /// Distinct lines touched by uniform-random, pointer-chase and spec-mix.
  std::uint32_t footprint_lines = 2048;
  double store_fraction = 0.1;
  /// Squash probability of each SPEC window (spec-mix, conflict-heavy).
  double p_squash = 0.1;
  /// Loads per SPEC window.
  std::uint32_t window_loads = 4;
  /// Non-speculative operations between windows.
  std::uint32_t gap_operations = 4;
  std::uint64_t base = 0x10000000;
  std::uint32_t line_size = 64;
  std::uint16_t domain = 0;
};

/// Reproducible workload for `seed`.
///
///  - uniform-random: loads and stores spread evenly over the footprint.
///  - pointer-chase:  loads walking one random cycle through the footprint.
///  - conflict-heavy: line numbers low + (high << 9) with low < 16 and
///                    high < 1024, so with few NEWS index bits many lines
///                    share an index; every window is speculative.
///  - spec-mix:       uniform-random traffic where loads run in SPEC windows
///                    squashed with probability p_squash.
std::vector<TraceEvent> synth_trace(SynthProfile profile, const SynthParams& params, std::uint64_t seed);

}  // namespace starsim
