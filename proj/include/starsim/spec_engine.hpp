#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "starsim/hierarchy.hpp"

namespace starsim {

enum class EntryKind : std::uint8_t { Load, Store, Barrier };

struct WindowEntry {
  RequestId id = 0;
  EntryKind kind = EntryKind::Load;
  Address addr;
  DomainId domain;
  bool spec_bit = false;
  bool executed = false;
  /// Barriers only: the guarded branch has been resolved.
  bool resolved = false;
  std::optional<MemoryResponse> response;
  std::vector<std::uint8_t> store_bytes;
};

/// Outcome of one squash. loads_squashed is the sum of the four counters.
struct SquashReport {
  std::uint64_t loads_squashed = 0;
  std::uint64_t sfill_inv_sent = 0;
  std::uint64_t sfill_inv_skipped_l1hit = 0;
  std::uint64_t sfill_inv_skipped_unexecuted = 0;
  /// Loads that missed L1 on a model without SFill-Inv support.
  std::uint64_t sfill_inv_disabled = 0;
  std::vector<RequestId> squashed_ids;
};

struct SpecEngineConfig {
  std::size_t capacity = 64;
  /// Committing a load also clears SpecBit on its line.
  bool clear_specbit_on_commit = false;
};

struct SpecEngineStats {
  std::uint64_t loads_issued = 0;
  std::uint64_t spec_loads = 0;
  std::uint64_t loads_committed = 0;
  std::uint64_t stores_committed = 0;
  std::uint64_t loads_squashed = 0;
  std::uint64_t sfill_inv_sent = 0;
  std::uint64_t sfill_inv_skipped_l1hit = 0;
  std::uint64_t sfill_inv_skipped_unexecuted = 0;
  std::uint64_t sfill_inv_disabled = 0;
  std::uint64_t eager_commits = 0;
};

/// In-order window of loads, stores and branch barriers. A load is
/// speculative when any older entry is unresolved: an unresolved barrier or
/// a load that has not executed yet. Loads access the hierarchy as soon as
/// they execute; stores write at commit.
class SpecEngine {
 public:
  explicit SpecEngine(Hierarchy& hierarchy, SpecEngineConfig config = {});

  /// With `execute` false the load waits in the window until execute().
  RequestId issue_load(Address addr, DomainId domain, bool execute = true);
  RequestId issue_store(Address addr, DomainId domain, std::vector<std::uint8_t> bytes);
  /// An unresolved branch: every younger load is speculative.
  RequestId issue_barrier();

  const MemoryResponse& execute(RequestId id);
  void resolve(RequestId id);

  /// Removes `id` and every younger entry, sending SFill-Inv for squashed
  /// loads that were served below L1. Never waits for the invalidations.
  SquashReport squash_from(RequestId id);

  /// Commits every entry up to and including `id`.
  void resolve_to(RequestId id);
  /// Commits everything in the window.
  void commit_all();

  const WindowEntry* find(RequestId id) const;
  bool empty() const noexcept { return window_.empty(); }
  std::size_t size() const noexcept { return window_.size(); }
  const SpecEngineStats& stats() const noexcept { return stats_; }
  Hierarchy& hierarchy() noexcept { return h_; }

 private:
  bool older_unresolved() const noexcept;
  std::size_t position(RequestId id) const;
  void make_room();
  void commit_head();
  void run_load(WindowEntry& e);

  Hierarchy& h_;
  SpecEngineConfig config_;
  std::deque<WindowEntry> window_;
  RequestId next_id_ = 1;
  SpecEngineStats stats_;
};

}  // namespace starsim
