#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "starsim/address.hpp"
#include "starsim/cache_types.hpp"
#include "starsim/rng.hpp"

namespace starsim {

struct ModelStats {
  std::uint64_t accesses = 0;
  std::uint64_t hits = 0;
  std::uint64_t misses_filled = 0;
  /// NEWS mapping hit + tag miss on a speculative load: data forwarded, no fill.
  std::uint64_t forward_nofill = 0;
  /// NEWS mapping hit + tag miss on a non-speculative load: C replaced in place.
  std::uint64_t tagmiss_replacements = 0;
  std::uint64_t mapping_misses = 0;
  std::uint64_t random_evictions = 0;
  std::uint64_t free_slot_fills = 0;
  std::uint64_t spec_bits_cleared = 0;
};

/// Common storage and bookkeeping for the three L1 designs. Subclasses own
/// the lookup structure and the miss policy; the base owns line metadata,
/// line payloads, the free-slot pool and the domain census used to find all
/// copies of a line.
class L1Cache {
 public:
  L1Cache(const CacheGeometry& geometry, std::uint32_t slots);
  virtual ~L1Cache() = default;

  L1Cache(const L1Cache&) = delete;
  L1Cache& operator=(const L1Cache&) = delete;

  virtual ModelKind kind() const noexcept = 0;
  /// True when a hit needs a DomainID match as well as a tag match.
  virtual bool domain_isolated() const noexcept = 0;

  /// Looks up, fetches from `below` on a miss and applies the model's fill
  /// and replacement policy. `below` may back-invalidate lines of this cache
  /// while it runs.
  virtual AccessOutcome access(const MemoryRequest& req, NextLevel& below) = 0;

  /// Slot holding `line` visible to `domain`, if any.
  virtual std::optional<std::uint32_t> find_slot(Address line, DomainId domain) const = 0;

  /// Slots holding `line` under any domain.
  virtual std::vector<std::uint32_t> copies_of(Address line) const;

  /// Level-1 handling of a squash invalidation. Speculative lines are
  /// dropped without write-back.
  SFillInvResult handle_sfill_inv(const SFillInvRequest& req);

  /// Removes the caller-visible copy of `line`.
  std::optional<EvictedLine> flush(Address line, DomainId domain);

  /// Inclusion back-invalidation: removes every copy regardless of domain.
  std::vector<EvictedLine> invalidate_all_copies(Address line);

  /// Removes copies of `line` owned by domains other than `keep`.
  std::vector<EvictedLine> invalidate_other_domains(Address line, DomainId keep);

  /// Empties the cache, returning every line (payload copied when dirty).
  std::vector<EvictedLine> evict_all();

  bool clear_spec_bit(Address line, DomainId domain);

  std::uint32_t slot_count() const noexcept { return static_cast<std::uint32_t>(lines_.size()); }
  std::size_t valid_count() const noexcept { return lines_.size() - free_.size(); }
  const CacheLine& line_at(std::uint32_t slot) const { return lines_.at(slot); }
  CacheLine& line_at(std::uint32_t slot) { return lines_.at(slot); }
  std::span<const std::uint8_t> data_at(std::uint32_t slot) const;
  std::span<std::uint8_t> data_at(std::uint32_t slot);

  const ModelStats& stats() const noexcept { return stats_; }
  const CacheGeometry& geometry() const noexcept { return geometry_; }

 protected:
  /// Invalidates `slot` and returns its contents (payload copied when dirty).
  EvictedLine remove(std::uint32_t slot);
  void install(std::uint32_t slot, const MemoryRequest& req, Address line, std::span<const std::uint8_t> data);
  void apply_hit(std::uint32_t slot, const MemoryRequest& req, AccessOutcome& out);

  bool has_free_slot() const noexcept { return !free_.empty(); }
  std::uint32_t next_free_slot();
  std::span<const DomainId> active_domains() const noexcept { return active_; }

  virtual void index_insert(std::uint32_t slot) = 0;
  virtual void index_erase(std::uint32_t slot) = 0;

  CacheGeometry geometry_;
  ModelStats stats_;

 private:
  void mark_free(std::uint32_t slot);
  void unmark_free(std::uint32_t slot);
  void count_domain(DomainId d, int delta);

  std::vector<CacheLine> lines_;
  std::vector<std::uint8_t> arena_;
  std::vector<std::uint32_t> free_;
  std::vector<std::int32_t> free_pos_;
  std::unordered_map<std::uint16_t, std::uint32_t> domain_census_;
  std::vector<DomainId> active_;
};

std::unique_ptr<L1Cache> make_l1(ModelKind kind, const CacheGeometry& geometry, unsigned news_extra_bits, Rng rng,
                                 FaultInjection fault = FaultInjection::None);

}  // namespace starsim
