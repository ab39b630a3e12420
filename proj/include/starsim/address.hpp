#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace starsim {

inline constexpr unsigned kAddressBits = 48;
inline constexpr std::uint64_t kAddressLimit = std::uint64_t{1} << kAddressBits;

/// A simulated physical address. Only the low 48 bits are significant and
/// every constructed Address is guaranteed to be below 2^48.
class Address {
 public:
  constexpr Address() = default;

  /// Throws std::out_of_range when `value` does not fit in 48 bits.
  static Address make(std::uint64_t value) {
    if (value >= kAddressLimit) {
      throw std::out_of_range("address exceeds 48 bits: " + std::to_string(value));
    }
    return Address(value);
  }

  constexpr std::uint64_t value() const noexcept { return value_; }

  constexpr Address plus(std::uint64_t bytes) const { return Address((value_ + bytes) & (kAddressLimit - 1)); }

  friend constexpr auto operator<=>(const Address&, const Address&) = default;

 private:
  constexpr explicit Address(std::uint64_t v) : value_(v) {}
  std::uint64_t value_ = 0;
};

/// Owner tag of a cache line or request. NONE never matches any request.
class DomainId {
 public:
  constexpr DomainId() = default;
  constexpr explicit DomainId(std::uint16_t id) : id_(id) {}

  static constexpr DomainId none() noexcept { return DomainId(0xFFFF); }

  constexpr std::uint16_t value() const noexcept { return id_; }
  constexpr bool is_none() const noexcept { return id_ == 0xFFFF; }

  friend constexpr auto operator<=>(const DomainId&, const DomainId&) = default;

 private:
  std::uint16_t id_ = 0xFFFF;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Hands out DomainIDs of a fixed width. Running out is a configuration
/// error rather than a wraparound.
class DomainAllocator {
 public:
  explicit DomainAllocator(unsigned width_bits = 8);

  DomainId allocate();
  unsigned width_bits() const noexcept { return width_; }
  bool fits(DomainId d) const noexcept;

 private:
  unsigned width_;
  std::uint32_t next_ = 0;
};

struct LevelGeometry {
  std::uint32_t lines = 0;
  std::uint32_t associativity = 1;
  std::uint32_t hit_cycles = 1;

  std::uint32_t sets() const noexcept { return lines / associativity; }
};

/// Sizes and latencies of the two-level hierarchy. Default is the desk-scale
/// profile: 32 KiB L1 of 64-byte lines (512 lines, 9 index bits).
struct CacheGeometry {
  std::uint32_t line_size_bytes = 64;
  LevelGeometry l1{512, 2, 1};
  LevelGeometry l2{4096, 8, 8};
  std::uint32_t memory_latency_cycles = 100;

  unsigned offset_bits() const noexcept;
  /// log2 of the number of physical L1 lines.
  unsigned base_index_bits() const noexcept;
  std::uint64_t l1_capacity_bytes() const noexcept {
    return std::uint64_t{line_size_bytes} * l1.lines;
  }

  /// Throws ConfigError describing the first violated constraint.
  void validate() const;
};

inline constexpr unsigned kMaxExtraIndexBits = 16;
inline constexpr std::uint32_t kMaxLineSize = 256;

struct AddressFields {
  std::uint64_t offset = 0;
  std::uint64_t index = 0;
  std::uint64_t tag = 0;
  unsigned offset_bits = 0;
  unsigned index_bits = 0;
  unsigned tag_bits = 0;
};

/// Splits `addr` into offset | index | tag, the index sitting directly above
/// the offset and being base_index_bits + extra_index_bits wide.
AddressFields decompose(Address addr, const CacheGeometry& geometry, unsigned extra_index_bits = 0);

Address reassemble(const AddressFields& fields);

inline Address line_of(Address addr, std::uint32_t line_size) {
  return Address::make(addr.value() & ~std::uint64_t{line_size - 1});
}

bool is_power_of_two(std::uint64_t v) noexcept;
unsigned log2_exact(std::uint64_t v) noexcept;

}  // namespace starsim

template <>
struct std::hash<starsim::Address> {
  std::size_t operator()(const starsim::Address& a) const noexcept { return std::hash<std::uint64_t>{}(a.value()); }
};
