#pragma once

#include <array>
#include <cstdint>

#include "starsim/address.hpp"

namespace starsim {

using AesBlock = std::array<std::uint8_t, 16>;

inline constexpr unsigned kAesTables = 4;
inline constexpr unsigned kAesTableEntries = 256;
inline constexpr unsigned kAesEntryBytes = 4;

/// Placement of the four 1 KiB T-tables. Each table starts a region of
/// `region_stride` bytes; the rest of the region is padding.
struct AesLayout {
  std::uint64_t base = 0x100000;
  std::uint64_t region_stride = 4096;

  Address table_base(unsigned table) const { return Address::make(base + std::uint64_t{table} * region_stride); }
};

struct AesAccess {
  unsigned table = 0;
  std::uint8_t entry = 0;
  Address addr;
  Address line;
};

/// Table used by key byte `j` (0-based): bytes 0,4,8,12 use T1, 1,5,9,13 T2, ...
constexpr unsigned aes_table_of(unsigned byte) noexcept { return byte % kAesTables; }

/// The 16 first-round lookups T_t[D_j xor K_j] in program order.
std::array<AesAccess, 16> aes_first_round_accesses(const AesBlock& key, const AesBlock& input,
                                                   const AesLayout& layout = {}, std::uint32_t line_size = 64);

}  // namespace starsim
