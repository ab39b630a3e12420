#include "starsim/mshr.hpp"

#include <algorithm>

namespace starsim {

Mshr::Mshr(std::uint32_t capacity, std::uint32_t stall_cycles) : capacity_(capacity), stall_cycles_(stall_cycles) {
  if (capacity == 0) throw ConfigError("MSHR needs at least one entry");
  entries_.reserve(capacity);
}

Mshr::Allocation Mshr::allocate(Address line, DomainId domain, RequestId id) {
  for (Entry& e : entries_) {
    if (e.line == line && e.domain == domain) {
      e.waiting.push_back(id);
      ++stats_.merges;
      return {true, 0};
    }
  }
  Allocation a;
  if (entries_.size() >= capacity_) {
    // Blocking model: the oldest miss completes while the request waits.
    entries_.erase(entries_.begin());
    a.stall_cycles = stall_cycles_;
    ++stats_.stalls;
  }
  entries_.push_back({line, domain, {id}});
  ++stats_.allocations;
  return a;
}

std::vector<RequestId> Mshr::release(Address line, DomainId domain) {
  const auto it = std::find_if(entries_.begin(), entries_.end(),
                               [&](const Entry& e) { return e.line == line && e.domain == domain; });
  if (it == entries_.end()) return {};
  std::vector<RequestId> ids = std::move(it->waiting);
  entries_.erase(it);
  return ids;
}

void Mshr::retire_all() { entries_.clear(); }

}  // namespace starsim
