#include <gtest/gtest.h>

#include "starsim/aes.hpp"
#include "starsim/rng.hpp"

using namespace starsim;

TEST(Aes, ZeroKeyZeroInputHitsEntryZeroOfEachTable) {
  const auto acc = aes_first_round_accesses({}, {});
  for (unsigned j = 0; j < 16; ++j) {
    EXPECT_EQ(acc[j].entry, 0);
    EXPECT_EQ(acc[j].table, j % 4);
    EXPECT_EQ(acc[j].addr, AesLayout{}.table_base(j % 4));
    EXPECT_EQ(acc[j].line, acc[j].addr);
  }
}

TEST(Aes, InputThirtyLandsInSecondLineOfItsTable) {
  AesBlock input{};
  input[1] = 30;
  const auto acc = aes_first_round_accesses({}, input);
  EXPECT_EQ(acc[1].table, 1u);
  EXPECT_EQ(acc[1].entry, 30);
  const std::uint64_t base = AesLayout{}.table_base(1).value();
  EXPECT_EQ(acc[1].addr.value(), base + 30 * 4);
  EXPECT_EQ((acc[1].line.value() - base) / 64, 1u);
}

TEST(Aes, EachTableSpansSixteenLines) {
  EXPECT_EQ(kAesTableEntries * kAesEntryBytes / 64, 16u);
}

TEST(Aes, AccessesMatchXorOracle) {
  Rng rng(5);
  const AesLayout layout;
  for (int i = 0; i < 10000; ++i) {
    AesBlock key{};
    AesBlock in{};
    for (auto& b : key) b = static_cast<std::uint8_t>(rng.next());
    for (auto& b : in) b = static_cast<std::uint8_t>(rng.next());
    const auto acc = aes_first_round_accesses(key, in, layout);
    for (unsigned j = 0; j < 16; ++j) {
      const unsigned e = in[j] ^ key[j];
      const std::uint64_t addr = layout.base + (j % 4) * layout.region_stride + e * 4;
      ASSERT_EQ(acc[j].addr.value(), addr);
      ASSERT_EQ(acc[j].line.value(), addr & ~std::uint64_t{63});
    }
  }
}
