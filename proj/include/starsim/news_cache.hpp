#pragma once

#include <unordered_map>

#include "starsim/l1_cache.hpp"

namespace starsim {

/// STAR-NEWS L1: NewCache-style dynamic remapping. Each physical line holds
/// a mapping entry (DomainID, Index) where Index is base_index_bits + k bits
/// wide, so the cache behaves like a 2^k times larger logical cache.
///
///  - mapping hit + Tag' hit:   HIT (non-speculative hit clears SpecBit)
///  - mapping hit + Tag' miss:  non-speculative -> replace C in place;
///                              speculative     -> forward without fill and
///                                                 evict a random line
///  - mapping miss:             replace a random line V with R
class NewsCache final : public L1Cache {
 public:
  NewsCache(const CacheGeometry& geometry, unsigned extra_index_bits, Rng rng,
            FaultInjection fault = FaultInjection::None);

  ModelKind kind() const noexcept override { return ModelKind::StarNews; }
  bool domain_isolated() const noexcept override { return true; }

  AccessOutcome access(const MemoryRequest& req, NextLevel& below) override;
  std::optional<std::uint32_t> find_slot(Address line, DomainId domain) const override;

  unsigned extra_index_bits() const noexcept { return extra_bits_; }
  std::uint64_t index_of(Address addr) const noexcept;
  /// Slot whose mapping entry is (domain, index_of(addr)), regardless of Tag'.
  std::optional<std::uint32_t> mapping_slot(Address addr, DomainId domain) const;

 protected:
  void index_insert(std::uint32_t slot) override;
  void index_erase(std::uint32_t slot) override;

 private:
  static std::uint64_t key(std::uint64_t index, DomainId d) noexcept { return (index << 16) | d.value(); }
  /// Free slot if one exists, otherwise a uniformly random slot.
  std::uint32_t choose_victim(AccessOutcome& out);

  unsigned extra_bits_;
  unsigned offset_bits_;
  std::uint64_t index_mask_;
  Rng rng_;
  FaultInjection fault_;
  std::unordered_map<std::uint64_t, std::uint32_t> mapping_;
};

}  // namespace starsim
