#pragma once

#include <cstdint>
#include <vector>

#include "starsim/address.hpp"
#include "starsim/cache_types.hpp"

namespace starsim {

struct MshrStats {
  std::uint64_t allocations = 0;
  std::uint64_t merges = 0;
  std::uint64_t stalls = 0;
};

/// Miss status holding registers. A miss merges into an outstanding entry
/// only when both the line and the DomainID match, so one domain can never
/// ride on another domain's in-flight miss.
class Mshr {
 public:
  explicit Mshr(std::uint32_t capacity = 16, std::uint32_t stall_cycles = 1);

  struct Allocation {
    bool merged = false;
    /// Cycles waited for a free entry.
    std::uint32_t stall_cycles = 0;
  };

  Allocation allocate(Address line, DomainId domain, RequestId id);
  /// Completes the entry for (line, domain) and returns its waiting ids.
  std::vector<RequestId> release(Address line, DomainId domain);
  /// Drops all entries, as when outstanding misses complete in bulk.
  void retire_all();

  std::size_t in_flight() const noexcept { return entries_.size(); }
  std::uint32_t capacity() const noexcept { return capacity_; }
  const MshrStats& stats() const noexcept { return stats_; }

 private:
  struct Entry {
    Address line;
    DomainId domain;
    std::vector<RequestId> waiting;
  };

  std::uint32_t capacity_;
  std::uint32_t stall_cycles_;
  std::vector<Entry> entries_;
  MshrStats stats_;
};

}  // namespace starsim
