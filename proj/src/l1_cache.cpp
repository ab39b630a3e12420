#include "starsim/l1_cache.hpp"

#include <algorithm>
#include <stdexcept>

#include "starsim/farr_cache.hpp"
#include "starsim/news_cache.hpp"
#include "starsim/sa_lru_cache.hpp"

namespace starsim {

L1Cache::L1Cache(const CacheGeometry& geometry, std::uint32_t slots)
    : geometry_(geometry),
      lines_(slots),
      arena_(std::size_t{slots} * geometry.line_size_bytes, 0),
      free_pos_(slots, -1) {
  free_.reserve(slots);
  // Highest slot on top so free fills proceed from slot 0 upwards.
  for (std::uint32_t s = slots; s-- > 0;) mark_free(s);
}

std::span<const std::uint8_t> L1Cache::data_at(std::uint32_t slot) const {
  return {arena_.data() + std::size_t{slot} * geometry_.line_size_bytes, geometry_.line_size_bytes};
}

std::span<std::uint8_t> L1Cache::data_at(std::uint32_t slot) {
  return {arena_.data() + std::size_t{slot} * geometry_.line_size_bytes, geometry_.line_size_bytes};
}

std::vector<std::uint32_t> L1Cache::copies_of(Address line) const {
  std::vector<std::uint32_t> out;
  for (DomainId d : active_) {
    if (auto s = find_slot(line, d)) out.push_back(*s);
  }
  return out;
}

SFillInvResult L1Cache::handle_sfill_inv(const SFillInvRequest& req) {
  const Address line = line_of(req.addr, geometry_.line_size_bytes);
  const auto slot = find_slot(line, req.domain);
  SFillInvCase found = SFillInvCase::NotFound;
  if (slot) {
    found = lines_[*slot].spec_bit ? SFillInvCase::FoundSpeculative : SFillInvCase::FoundNonSpeculative;
  }
  const SFillInvResult result = decide_sfill_inv(found, req.source_level, 1);
  if (found == SFillInvCase::FoundSpeculative) {
    // SpecBit lines are never dirty, so nothing is written back.
    remove(*slot);
  }
  return result;
}

std::optional<EvictedLine> L1Cache::flush(Address line, DomainId domain) {
  const auto slot = find_slot(line, domain);
  if (!slot) return std::nullopt;
  return remove(*slot);
}

std::vector<EvictedLine> L1Cache::invalidate_all_copies(Address line) {
  std::vector<EvictedLine> out;
  for (std::uint32_t slot : copies_of(line)) out.push_back(remove(slot));
  return out;
}

std::vector<EvictedLine> L1Cache::invalidate_other_domains(Address line, DomainId keep) {
  std::vector<EvictedLine> out;
  for (std::uint32_t slot : copies_of(line)) {
    if (lines_[slot].domain != keep) out.push_back(remove(slot));
  }
  return out;
}

std::vector<EvictedLine> L1Cache::evict_all() {
  std::vector<EvictedLine> out;
  for (std::uint32_t slot = 0; slot < slot_count(); ++slot) {
    if (lines_[slot].valid) out.push_back(remove(slot));
  }
  return out;
}

bool L1Cache::clear_spec_bit(Address line, DomainId domain) {
  const auto slot = find_slot(line, domain);
  if (!slot || !lines_[*slot].spec_bit) return false;
  lines_[*slot].spec_bit = false;
  ++stats_.spec_bits_cleared;
  return true;
}

EvictedLine L1Cache::remove(std::uint32_t slot) {
  CacheLine& l = lines_.at(slot);
  if (!l.valid) throw std::logic_error("L1Cache::remove on an invalid slot");
  index_erase(slot);
  EvictedLine ev{l.line, l.domain, l.dirty, l.spec_bit, l.installed_by, {}};
  if (l.dirty) ev.data.assign(data_at(slot));
  count_domain(l.domain, -1);
  l = CacheLine{};
  mark_free(slot);
  return ev;
}

void L1Cache::install(std::uint32_t slot, const MemoryRequest& req, Address line,
                      std::span<const std::uint8_t> data) {
  CacheLine& l = lines_.at(slot);
  if (l.valid) throw std::logic_error("L1Cache::install over a valid slot");
  unmark_free(slot);
  l.valid = true;
  l.dirty = false;
  l.spec_bit = req.spec_bit;
  l.domain = req.domain;
  l.line = line;
  l.installed_by = req.id;
  std::copy(data.begin(), data.end(), data_at(slot).begin());
  count_domain(req.domain, +1);
  index_insert(slot);
}

void L1Cache::apply_hit(std::uint32_t slot, const MemoryRequest& req, AccessOutcome& out) {
  CacheLine& l = lines_[slot];
  if (!req.spec_bit && l.spec_bit) {
    l.spec_bit = false;
    out.spec_cleared = true;
    ++stats_.spec_bits_cleared;
  }
  out.kind = AccessKind::Hit;
  out.source_level = 1;
  out.latency_cycles = geometry_.l1.hit_cycles;
  out.data.assign(data_at(slot));
  ++stats_.hits;
}

std::uint32_t L1Cache::next_free_slot() {
  if (free_.empty()) throw std::logic_error("no free L1 slot");
  return free_.back();
}

void L1Cache::mark_free(std::uint32_t slot) {
  free_pos_[slot] = static_cast<std::int32_t>(free_.size());
  free_.push_back(slot);
}

void L1Cache::unmark_free(std::uint32_t slot) {
  const std::int32_t pos = free_pos_[slot];
  if (pos < 0) return;
  const std::uint32_t last = free_.back();
  free_[static_cast<std::size_t>(pos)] = last;
  free_pos_[last] = pos;
  free_.pop_back();
  free_pos_[slot] = -1;
}

void L1Cache::count_domain(DomainId d, int delta) {
  auto& n = domain_census_[d.value()];
  if (delta > 0) {
    if (n++ == 0) active_.push_back(d);
  } else if (--n == 0) {
    active_.erase(std::find(active_.begin(), active_.end(), d));
    domain_census_.erase(d.value());
  }
}

std::unique_ptr<L1Cache> make_l1(ModelKind kind, const CacheGeometry& geometry, unsigned news_extra_bits, Rng rng,
                                 FaultInjection fault) {
  switch (kind) {
    case ModelKind::SaLru: return std::make_unique<SaLruCache>(geometry);
    case ModelKind::StarFarr: return std::make_unique<FarrCache>(geometry, rng, fault);
    case ModelKind::StarNews: return std::make_unique<NewsCache>(geometry, news_extra_bits, rng, fault);
  }
  throw ConfigError("unknown L1 model");
}

}  // namespace starsim
