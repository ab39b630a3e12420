#include "starsim/address.hpp"

#include <bit>

namespace starsim {

bool is_power_of_two(std::uint64_t v) noexcept { return std::has_single_bit(v); }

unsigned log2_exact(std::uint64_t v) noexcept { return static_cast<unsigned>(std::countr_zero(v)); }

DomainAllocator::DomainAllocator(unsigned width_bits) : width_(width_bits) {
  if (width_bits == 0 || width_bits > 16) {
    throw ConfigError("domain width must be within 1..16 bits");
  }
}

DomainId DomainAllocator::allocate() {
  // 0xFFFF is NONE, so a 16-bit allocator has one fewer usable value.
  const std::uint32_t limit = width_ == 16 ? 0xFFFFu : (1u << width_);
  if (next_ >= limit) {
    throw ConfigError("out of DomainIDs for a " + std::to_string(width_) + "-bit domain field");
  }
  return DomainId(static_cast<std::uint16_t>(next_++));
}

bool DomainAllocator::fits(DomainId d) const noexcept {
  if (d.is_none()) return false;
  return width_ == 16 || d.value() < (1u << width_);
}

unsigned CacheGeometry::offset_bits() const noexcept { return log2_exact(line_size_bytes); }

unsigned CacheGeometry::base_index_bits() const noexcept { return log2_exact(l1.lines); }

void CacheGeometry::validate() const {
  if (!is_power_of_two(line_size_bytes) || line_size_bytes < 8 || line_size_bytes > kMaxLineSize) {
    throw ConfigError("line size must be a power of two in [8, 256]");
  }
  for (const auto* level : {&l1, &l2}) {
    const char* name = level == &l1 ? "L1" : "L2";
    if (!is_power_of_two(level->lines)) {
      throw ConfigError(std::string(name) + " line count must be a power of two");
    }
    if (level->associativity == 0 || !is_power_of_two(level->associativity) ||
        level->associativity > level->lines) {
      throw ConfigError(std::string(name) + " associativity must be a power of two dividing the line count");
    }
    if (level->hit_cycles < 1) {
      throw ConfigError(std::string(name) + " hit latency must be at least 1 cycle");
    }
  }
  if (l2.lines < l1.lines) {
    throw ConfigError("inclusive L2 must hold at least as many lines as L1");
  }
  if (memory_latency_cycles < 1) {
    throw ConfigError("memory latency must be at least 1 cycle");
  }
  if (offset_bits() + base_index_bits() + kMaxExtraIndexBits > kAddressBits) {
    throw ConfigError("geometry leaves no room for tag bits");
  }
}

AddressFields decompose(Address addr, const CacheGeometry& geometry, unsigned extra_index_bits) {
  AddressFields f;
  f.offset_bits = geometry.offset_bits();
  f.index_bits = geometry.base_index_bits() + extra_index_bits;
  f.tag_bits = kAddressBits - f.offset_bits - f.index_bits;
  const std::uint64_t v = addr.value();
  f.offset = v & ((std::uint64_t{1} << f.offset_bits) - 1);
  f.index = (v >> f.offset_bits) & ((std::uint64_t{1} << f.index_bits) - 1);
  f.tag = v >> (f.offset_bits + f.index_bits);
  return f;
}

Address reassemble(const AddressFields& f) {
  return Address::make((f.tag << (f.offset_bits + f.index_bits)) | (f.index << f.offset_bits) | f.offset);
}

}  // namespace starsim
