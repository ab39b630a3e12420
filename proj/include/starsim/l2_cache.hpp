#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "starsim/address.hpp"
#include "starsim/cache_types.hpp"

namespace starsim {

struct L2Stats {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t evictions = 0;
  std::uint64_t dirty_evictions = 0;
  std::uint64_t spec_bits_cleared = 0;
};

/// Conventional set-associative LRU level. Lines record the installing
/// domain and SpecBit for squash handling, but lookups ignore the domain.
class L2Cache {
 public:
  explicit L2Cache(const CacheGeometry& geometry);

  std::optional<std::uint32_t> find(Address line) const;
  /// Marks `slot` most recently used.
  void touch(std::uint32_t slot);

  struct Installed {
    std::uint32_t slot = 0;
    std::optional<EvictedLine> evicted;
  };
  /// Installs `line` over the LRU way of its set. The evicted line (if any)
  /// is returned and is the caller's to write back and back-invalidate.
  Installed install(Address line, const MemoryRequest& req, std::span<const std::uint8_t> data);

  EvictedLine remove(std::uint32_t slot);

  const CacheLine& line_at(std::uint32_t slot) const { return lines_.at(slot); }
  CacheLine& line_at(std::uint32_t slot) { return lines_.at(slot); }
  std::span<const std::uint8_t> data_at(std::uint32_t slot) const;
  std::span<std::uint8_t> data_at(std::uint32_t slot);

  std::uint32_t slot_count() const noexcept { return static_cast<std::uint32_t>(lines_.size()); }
  std::size_t valid_count() const noexcept { return valid_; }
  std::uint32_t set_of(Address line) const noexcept;

  L2Stats& stats() noexcept { return stats_; }
  const L2Stats& stats() const noexcept { return stats_; }

 private:
  std::uint32_t line_size_;
  std::uint32_t sets_;
  std::uint32_t ways_;
  unsigned offset_bits_;
  std::vector<CacheLine> lines_;
  std::vector<std::uint8_t> arena_;
  std::vector<std::uint64_t> last_use_;
  std::uint64_t clock_ = 0;
  std::size_t valid_ = 0;
  L2Stats stats_;
};

}  // namespace starsim
