#pragma once

#include <vector>

#include "starsim/l1_cache.hpp"

namespace starsim {

/// Conventional set-associative L1 with true LRU replacement. DomainIDs and
/// SpecBits are recorded but never consulted: any domain hits any line.
class SaLruCache final : public L1Cache {
 public:
  explicit SaLruCache(const CacheGeometry& geometry);

  ModelKind kind() const noexcept override { return ModelKind::SaLru; }
  bool domain_isolated() const noexcept override { return false; }

  AccessOutcome access(const MemoryRequest& req, NextLevel& below) override;
  std::optional<std::uint32_t> find_slot(Address line, DomainId domain) const override;
  std::vector<std::uint32_t> copies_of(Address line) const override;

  std::uint32_t set_of(Address line) const noexcept;

 protected:
  void index_insert(std::uint32_t slot) override;
  void index_erase(std::uint32_t) override {}

 private:
  std::uint32_t pick_victim(std::uint32_t set) const;

  std::uint32_t sets_;
  std::uint32_t ways_;
  unsigned offset_bits_;
  std::vector<std::uint64_t> last_use_;
  std::uint64_t clock_ = 0;
};

}  // namespace starsim
