#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "starsim/cache_types.hpp"
#include "starsim/flat_memory.hpp"
#include "starsim/l1_cache.hpp"
#include "starsim/l2_cache.hpp"
#include "starsim/mshr.hpp"
#include "starsim/rng.hpp"

namespace starsim {

struct HierarchyConfig {
  CacheGeometry geometry;
  ModelKind model = ModelKind::SaLru;
  /// NEWS extra index bits; must be 0 for the other models.
  unsigned news_k = 0;
  std::uint64_t seed = 1;
  std::uint32_t mshr_entries = 16;
  /// Verify inclusion and line-state invariants after every operation.
  bool check_invariants = false;
  FaultInjection fault = FaultInjection::None;

  /// Throws ConfigError.
  void validate() const;
};

struct MemoryResponse {
  LineBuffer data;
  std::uint32_t latency_cycles = 0;
  /// 1 = L1 hit, 2 = L2 hit, 3 = memory.
  unsigned source_level = 1;
  AccessKind l1_kind = AccessKind::Hit;
  std::optional<Address> l1_victim;
  std::optional<std::uint32_t> random_victim_slot;
};

struct HierarchyStats {
  std::uint64_t loads = 0;
  std::uint64_t stores = 0;
  std::uint64_t flushes = 0;
  std::uint64_t l1_hits = 0;
  std::uint64_t l2_hits = 0;
  std::uint64_t memory_fills = 0;
  std::uint64_t forward_nofill = 0;
  std::uint64_t l1_writebacks = 0;
  std::uint64_t memory_writebacks = 0;
  std::uint64_t back_invalidations = 0;
  std::uint64_t coherence_writebacks = 0;
  std::uint64_t sfill_inv_received = 0;
  /// Squash invalidations ignored because the L1 model has no SpecBit logic.
  std::uint64_t sfill_inv_disabled = 0;
  /// Indexed by SFillInvCase.
  std::array<std::uint64_t, 3> sfill_l1_cases{};
  std::array<std::uint64_t, 3> sfill_l2_cases{};
  std::uint64_t sfill_l1_propagated = 0;
  std::uint64_t sfill_l2_propagated = 0;
  /// SFill-Inv responses ever produced. The request is one-way, so this stays 0.
  std::uint64_t sfill_inv_responses = 0;
};

/// L1 (any model) over an inclusive write-back LRU L2 over FlatMemory.
class Hierarchy {
 public:
  explicit Hierarchy(const HierarchyConfig& config);
  ~Hierarchy();

  Hierarchy(const Hierarchy&) = delete;
  Hierarchy& operator=(const Hierarchy&) = delete;

  /// Load (or the allocate half of a store).
  MemoryResponse access(const MemoryRequest& req);

  /// Write-allocate store of `bytes` at `req.addr`; the bytes must not cross
  /// a line boundary.
  MemoryResponse store(const MemoryRequest& req, std::span<const std::uint8_t> bytes);

  /// clflush restricted to the caller's domain. Returns whether any copy was
  /// removed.
  bool flush(Address addr, DomainId domain);

  /// One-way squash invalidation; returns nothing to the issuer.
  void sfill_inv(const SFillInvRequest& req);

  /// Clears SpecBit on the caller's L1 copy and on the L2 copy.
  void clear_spec_bit(Address addr, DomainId domain);

  /// True when squashes should generate SFill-Inv requests (STAR models).
  bool sfill_inv_enabled() const noexcept;

  /// Writes every dirty line back to memory and empties both caches.
  void drain();

  /// Throws ContractViolation when an L1 line is missing from L2 or a line
  /// is both speculative and dirty.
  void check_invariants() const;

  /// Lines anywhere in the hierarchy that were installed by `id` and still
  /// carry SpecBit.
  std::vector<Address> speculative_lines_installed_by(RequestId id) const;

  const HierarchyConfig& config() const noexcept { return config_; }
  const CacheGeometry& geometry() const noexcept { return config_.geometry; }
  L1Cache& l1() noexcept { return *l1_; }
  const L1Cache& l1() const noexcept { return *l1_; }
  L2Cache& l2() noexcept { return l2_; }
  const L2Cache& l2() const noexcept { return l2_; }
  FlatMemory& memory() noexcept { return memory_; }
  const FlatMemory& memory() const noexcept { return memory_; }
  const Mshr& mshr() const noexcept { return mshr_; }
  const HierarchyStats& stats() const noexcept { return stats_; }

 private:
  class Port;
  friend class Port;

  Fill fetch(const MemoryRequest& req);
  void write_back_to_l2(const EvictedLine& ev);
  /// Writes back and back-invalidates a line that has left L2.
  void evict_from_l2(const EvictedLine& ev);
  void maybe_check() const;

  HierarchyConfig config_;
  std::unique_ptr<L1Cache> l1_;
  L2Cache l2_;
  FlatMemory memory_;
  Mshr mshr_;
  std::unique_ptr<Port> port_;
  HierarchyStats stats_;
  LineBuffer scratch_;
};

}  // namespace starsim
