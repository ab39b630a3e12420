#pragma once

#include <unordered_map>

#include "starsim/l1_cache.hpp"

namespace starsim {

/// STAR-FARR L1: fully associative, uniformly random replacement, hits
/// require tag AND DomainID match, every line carries a SpecBit.
class FarrCache final : public L1Cache {
 public:
  FarrCache(const CacheGeometry& geometry, Rng rng, FaultInjection fault = FaultInjection::None);

  ModelKind kind() const noexcept override { return ModelKind::StarFarr; }
  bool domain_isolated() const noexcept override { return true; }

  AccessOutcome access(const MemoryRequest& req, NextLevel& below) override;
  std::optional<std::uint32_t> find_slot(Address line, DomainId domain) const override;

 protected:
  void index_insert(std::uint32_t slot) override;
  void index_erase(std::uint32_t slot) override;

 private:
  static std::uint64_t key(Address line, DomainId d) noexcept { return (line.value() << 16) | d.value(); }

  Rng rng_;
  FaultInjection fault_;
  std::unordered_map<std::uint64_t, std::uint32_t> index_;
};

}  // namespace starsim
