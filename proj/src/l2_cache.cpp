#include "starsim/l2_cache.hpp"

#include <algorithm>
#include <stdexcept>

namespace starsim {

L2Cache::L2Cache(const CacheGeometry& geometry)
    : line_size_(geometry.line_size_bytes),
      sets_(geometry.l2.sets()),
      ways_(geometry.l2.associativity),
      offset_bits_(geometry.offset_bits()),
      lines_(geometry.l2.lines),
      arena_(std::size_t{geometry.l2.lines} * geometry.line_size_bytes, 0),
      last_use_(geometry.l2.lines, 0) {}

std::uint32_t L2Cache::set_of(Address line) const noexcept {
  return static_cast<std::uint32_t>((line.value() >> offset_bits_) & (sets_ - 1));
}

std::optional<std::uint32_t> L2Cache::find(Address line) const {
  const std::uint32_t base = set_of(line) * ways_;
  for (std::uint32_t w = 0; w < ways_; ++w) {
    const CacheLine& l = lines_[base + w];
    if (l.valid && l.line == line) return base + w;
  }
  return std::nullopt;
}

void L2Cache::touch(std::uint32_t slot) { last_use_[slot] = ++clock_; }

std::span<const std::uint8_t> L2Cache::data_at(std::uint32_t slot) const {
  return {arena_.data() + std::size_t{slot} * line_size_, line_size_};
}

std::span<std::uint8_t> L2Cache::data_at(std::uint32_t slot) {
  return {arena_.data() + std::size_t{slot} * line_size_, line_size_};
}

L2Cache::Installed L2Cache::install(Address line, const MemoryRequest& req, std::span<const std::uint8_t> data) {
  const std::uint32_t base = set_of(line) * ways_;
  std::uint32_t victim = base;
  for (std::uint32_t w = 0; w < ways_; ++w) {
    if (!lines_[base + w].valid) {
      victim = base + w;
      break;
    }
    if (last_use_[base + w] < last_use_[victim]) victim = base + w;
  }
  Installed result{victim, std::nullopt};
  if (lines_[victim].valid) {
    result.evicted = remove(victim);
    ++stats_.evictions;
    if (result.evicted->dirty) ++stats_.dirty_evictions;
  }
  CacheLine& l = lines_[victim];
  l.valid = true;
  l.dirty = false;
  l.spec_bit = req.spec_bit;
  l.domain = req.domain;
  l.line = line;
  l.installed_by = req.id;
  std::copy(data.begin(), data.end(), data_at(victim).begin());
  touch(victim);
  ++valid_;
  return result;
}

EvictedLine L2Cache::remove(std::uint32_t slot) {
  CacheLine& l = lines_.at(slot);
  if (!l.valid) throw std::logic_error("L2Cache::remove on an invalid slot");
  EvictedLine ev{l.line, l.domain, l.dirty, l.spec_bit, l.installed_by, {}};
  if (l.dirty) ev.data.assign(data_at(slot));
  l = CacheLine{};
  --valid_;
  return ev;
}

}  // namespace starsim
