#include "starsim/sa_lru_cache.hpp"

namespace starsim {

SaLruCache::SaLruCache(const CacheGeometry& geometry)
    : L1Cache(geometry, geometry.l1.lines),
      sets_(geometry.l1.sets()),
      ways_(geometry.l1.associativity),
      offset_bits_(geometry.offset_bits()),
      last_use_(geometry.l1.lines, 0) {}

std::uint32_t SaLruCache::set_of(Address line) const noexcept {
  return static_cast<std::uint32_t>((line.value() >> offset_bits_) & (sets_ - 1));
}

std::optional<std::uint32_t> SaLruCache::find_slot(Address line, DomainId) const {
  const std::uint32_t base = set_of(line) * ways_;
  for (std::uint32_t w = 0; w < ways_; ++w) {
    const CacheLine& l = line_at(base + w);
    if (l.valid && l.line == line) return base + w;
  }
  return std::nullopt;
}

std::vector<std::uint32_t> SaLruCache::copies_of(Address line) const {
  std::vector<std::uint32_t> out;
  if (auto s = find_slot(line, DomainId::none())) out.push_back(*s);
  return out;
}

std::uint32_t SaLruCache::pick_victim(std::uint32_t set) const {
  const std::uint32_t base = set * ways_;
  std::uint32_t victim = base;
  for (std::uint32_t w = 0; w < ways_; ++w) {
    if (!line_at(base + w).valid) return base + w;
    if (last_use_[base + w] < last_use_[victim]) victim = base + w;
  }
  return victim;
}

void SaLruCache::index_insert(std::uint32_t slot) { last_use_[slot] = ++clock_; }

AccessOutcome SaLruCache::access(const MemoryRequest& req, NextLevel& below) {
  ++stats_.accesses;
  AccessOutcome out;
  const Address line = line_of(req.addr, geometry_.line_size_bytes);
  if (auto slot = find_slot(line, req.domain)) {
    apply_hit(*slot, req, out);
    last_use_[*slot] = ++clock_;
    return out;
  }

  const Fill fill = below.fetch(req);
  out.data.assign(fill.data);
  out.kind = AccessKind::MissFilled;
  out.source_level = fill.source_level;
  out.latency_cycles = geometry_.l1.hit_cycles + fill.latency_cycles;

  const std::uint32_t victim = pick_victim(set_of(line));
  if (line_at(victim).valid) out.evicted = remove(victim);
  install(victim, req, line, out.data.view());
  ++stats_.misses_filled;
  return out;
}

}  // namespace starsim
