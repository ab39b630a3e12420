#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "starsim/cache_types.hpp"

namespace starsim {

struct SelfTestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Invariant suites at reduced trial counts. `fault` swaps in a broken
/// model so the suite can be shown to catch it.
std::vector<SelfTestCheck> run_selftest(FaultInjection fault = FaultInjection::None, std::uint64_t seed = 1);

/// Victim-slot histogram of `events` random replacements in a full L1 of
/// the given model, 512 slots folded into 16 bins.
std::vector<std::uint64_t> replacement_histogram(ModelKind model, std::uint64_t events, std::uint64_t seed,
                                                 FaultInjection fault = FaultInjection::None);

}  // namespace starsim
