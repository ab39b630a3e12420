#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "starsim/hierarchy.hpp"
#include "starsim/observation.hpp"
#include "starsim/spec_engine.hpp"
#include "starsim/trace.hpp"

namespace starsim {

struct ReplayStats {
  std::uint64_t loads = 0;
  std::uint64_t stores = 0;
  std::uint64_t l1_hits = 0;
  /// L1 misses served by L2 and by memory.
  std::uint64_t l1_miss_l2 = 0;
  std::uint64_t l1_miss_mem = 0;
  std::uint64_t spec_loads = 0;
  std::uint64_t loads_squashed = 0;
  std::uint64_t sfill_inv_sent = 0;
  std::uint64_t sfill_inv_skipped_l1hit = 0;
  std::uint64_t sfill_inv_skipped_unexecuted = 0;
  /// SFill-Inv requests dropped because the line was non-speculative, at any level.
  std::uint64_t sfill_inv_dropped_case_i = 0;
  /// NEWS mapping hit + tag miss on a speculative load.
  std::uint64_t tagmiss_forward_nofill = 0;
  std::uint64_t total_latency_cycles = 0;

  std::uint64_t l1_misses() const noexcept { return l1_miss_l2 + l1_miss_mem; }
  /// Fraction of speculative loads that were squashed.
  double squashed_load_fraction() const noexcept;

  ReplayStats& operator+=(const ReplayStats& o) noexcept;

  /// Named columns in a fixed order, shared by CSV and table output.
  std::vector<std::pair<std::string, std::string>> fields() const;
};

struct ReplayConfig {
  HierarchyConfig hierarchy;
  SpecEngineConfig engine;
};

/// Drives `events` through a fresh engine and hierarchy. Loads inside SPEC
/// windows are speculative; a squash removes the whole window.
ReplayStats replay(const std::vector<TraceEvent>& events, const ReplayConfig& config);

/// Header line plus one value line per row; `labels` prefix each row.
void write_stats_csv(std::ostream& os, const ConfigEcho& echo, const std::vector<std::string>& label_names,
                     const std::vector<std::pair<std::vector<std::string>, ReplayStats>>& rows);

void write_stats_table(std::ostream& os, const ReplayStats& stats);

}  // namespace starsim
