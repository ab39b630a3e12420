#include "starsim/aes.hpp"

namespace starsim {

std::array<AesAccess, 16> aes_first_round_accesses(const AesBlock& key, const AesBlock& input,
                                                   const AesLayout& layout, std::uint32_t line_size) {
  std::array<AesAccess, 16> out{};
  for (unsigned j = 0; j < 16; ++j) {
    AesAccess& a = out[j];
    a.table = aes_table_of(j);
    a.entry = static_cast<std::uint8_t>(input[j] ^ key[j]);
    a.addr = layout.table_base(a.table).plus(std::uint64_t{a.entry} * kAesEntryBytes);
    a.line = line_of(a.addr, line_size);
  }
  return out;
}

}  // namespace starsim
