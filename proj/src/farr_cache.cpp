#include "starsim/farr_cache.hpp"

namespace starsim {

FarrCache::FarrCache(const CacheGeometry& geometry, Rng rng, FaultInjection fault)
    : L1Cache(geometry, geometry.l1.lines), rng_(rng), fault_(fault) {
  index_.reserve(geometry.l1.lines * 2);
}

std::optional<std::uint32_t> FarrCache::find_slot(Address line, DomainId domain) const {
  const auto it = index_.find(key(line, domain));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void FarrCache::index_insert(std::uint32_t slot) {
  const CacheLine& l = line_at(slot);
  index_.emplace(key(l.line, l.domain), slot);
}

void FarrCache::index_erase(std::uint32_t slot) {
  const CacheLine& l = line_at(slot);
  index_.erase(key(l.line, l.domain));
}

AccessOutcome FarrCache::access(const MemoryRequest& req, NextLevel& below) {
  ++stats_.accesses;
  AccessOutcome out;
  const Address line = line_of(req.addr, geometry_.line_size_bytes);
  if (auto slot = find_slot(line, req.domain)) {
    apply_hit(*slot, req, out);
    return out;
  }

  const Fill fill = below.fetch(req);
  out.data.assign(fill.data);
  out.kind = AccessKind::MissFilled;
  out.source_level = fill.source_level;
  out.latency_cycles = geometry_.l1.hit_cycles + fill.latency_cycles;

  std::uint32_t victim = 0;
  if (has_free_slot()) {
    victim = next_free_slot();
    ++stats_.free_slot_fills;
  } else {
    victim = fault_ == FaultInjection::FarrDeterministicVictim
                 ? 0
                 : static_cast<std::uint32_t>(rng_.choose(slot_count()));
    out.random_victim_slot = victim;
    out.evicted = remove(victim);
    ++stats_.random_evictions;
  }
  install(victim, req, line, out.data.view());
  ++stats_.misses_filled;
  return out;
}

}  // namespace starsim
