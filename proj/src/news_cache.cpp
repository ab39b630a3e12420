#include "starsim/news_cache.hpp"

namespace starsim {

NewsCache::NewsCache(const CacheGeometry& geometry, unsigned extra_index_bits, Rng rng, FaultInjection fault)
    : L1Cache(geometry, geometry.l1.lines),
      extra_bits_(extra_index_bits),
      offset_bits_(geometry.offset_bits()),
      index_mask_((std::uint64_t{1} << (geometry.base_index_bits() + extra_index_bits)) - 1),
      rng_(rng),
      fault_(fault) {
  if (extra_index_bits > kMaxExtraIndexBits) {
    throw ConfigError("NEWS extra index bits must be within 0..16");
  }
  mapping_.reserve(geometry.l1.lines * 2);
}

std::uint64_t NewsCache::index_of(Address addr) const noexcept { return (addr.value() >> offset_bits_) & index_mask_; }

std::optional<std::uint32_t> NewsCache::mapping_slot(Address addr, DomainId domain) const {
  const auto it = mapping_.find(key(index_of(addr), domain));
  if (it == mapping_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::uint32_t> NewsCache::find_slot(Address line, DomainId domain) const {
  auto slot = mapping_slot(line, domain);
  if (slot && line_at(*slot).line == line) return slot;
  return std::nullopt;
}

void NewsCache::index_insert(std::uint32_t slot) {
  const CacheLine& l = line_at(slot);
  mapping_.emplace(key(index_of(l.line), l.domain), slot);
}

void NewsCache::index_erase(std::uint32_t slot) {
  const CacheLine& l = line_at(slot);
  mapping_.erase(key(index_of(l.line), l.domain));
}

std::uint32_t NewsCache::choose_victim(AccessOutcome& out) {
  if (has_free_slot()) {
    ++stats_.free_slot_fills;
    return next_free_slot();
  }
  const auto victim = static_cast<std::uint32_t>(rng_.choose(slot_count()));
  out.random_victim_slot = victim;
  out.evicted = remove(victim);
  ++stats_.random_evictions;
  return victim;
}

AccessOutcome NewsCache::access(const MemoryRequest& req, NextLevel& below) {
  ++stats_.accesses;
  AccessOutcome out;
  const Address line = line_of(req.addr, geometry_.line_size_bytes);
  if (auto slot = find_slot(line, req.domain)) {
    apply_hit(*slot, req, out);
    return out;
  }

  const Fill fill = below.fetch(req);
  out.data.assign(fill.data);
  out.source_level = fill.source_level;
  out.latency_cycles = geometry_.l1.hit_cycles + fill.latency_cycles;

  // The fetch may have back-invalidated lines, so the mapping is re-read.
  const auto conflicting = mapping_slot(line, req.domain);
  if (conflicting) {
    const bool fill_in_place = !req.spec_bit || fault_ == FaultInjection::NewsFillOnSpecTagMiss;
    if (fill_in_place) {
      out.evicted = remove(*conflicting);
      install(*conflicting, req, line, out.data.view());
      out.kind = AccessKind::MissFilled;
      ++stats_.tagmiss_replacements;
      ++stats_.misses_filled;
    } else {
      // Same observable eviction as a mapping miss, but R is not installed.
      const std::uint32_t victim = choose_victim(out);
      (void)victim;
      out.kind = AccessKind::MissForwardNoFill;
      ++stats_.forward_nofill;
    }
    return out;
  }

  const std::uint32_t victim = choose_victim(out);
  install(victim, req, line, out.data.view());
  out.kind = AccessKind::MissFilled;
  ++stats_.mapping_misses;
  ++stats_.misses_filled;
  return out;
}

}  // namespace starsim
