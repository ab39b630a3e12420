#include <gtest/gtest.h>

#include <vector>

#include "starsim/hierarchy.hpp"
#include "starsim/rng.hpp"
#include "starsim/spec_engine.hpp"

using namespace starsim;

namespace {

const DomainId kD1(1);
const DomainId kD2(2);

HierarchyConfig star(ModelKind m, unsigned k = 0, std::uint64_t seed = 1) {
  HierarchyConfig c;
  c.model = m;
  c.news_k = m == ModelKind::StarNews ? k : 0;
  c.seed = seed;
  c.check_invariants = true;
  return c;
}

}  // namespace

// Oracle written from the three-case prose independently of the implementation.
TEST(SFillInvDecision, AllCasesLevelsAndSources) {
  for (unsigned level = 1; level <= 2; ++level) {
    for (unsigned src = 2; src <= 3; ++src) {
      const auto i = decide_sfill_inv(SFillInvCase::FoundNonSpeculative, src, level);
      EXPECT_EQ(i.action, SFillInvAction::Drop);
      const auto ii = decide_sfill_inv(SFillInvCase::FoundSpeculative, src, level);
      EXPECT_EQ(ii.action, src > level ? SFillInvAction::Propagate : SFillInvAction::Drop);
      const auto iii = decide_sfill_inv(SFillInvCase::NotFound, src, level);
      EXPECT_EQ(iii.action, src > level ? SFillInvAction::Propagate : SFillInvAction::Drop);
    }
  }
}

TEST(SFillInv, NonSpeculativeLineIsDroppedUntouched) {
  Hierarchy h(star(ModelKind::StarFarr));
  const Address a = Address::make(0x1000);
  h.access(MemoryRequest::load(a, kD1));
  h.sfill_inv({a, kD1, 3, 0});
  EXPECT_TRUE(h.l1().find_slot(a, kD1));
  EXPECT_TRUE(h.l2().find(a));
  EXPECT_EQ(h.stats().sfill_l1_propagated, 0u);
}

TEST(SFillInv, SpeculativeFillFromMemoryIsRemovedAtBothLevels) {
  for (ModelKind m : {ModelKind::StarFarr, ModelKind::StarNews}) {
    Hierarchy h(star(m, 4));
    const Address a = Address::make(0x1000);
    ASSERT_EQ(h.access(MemoryRequest::load(a, kD1, true)).source_level, 3u);
    h.sfill_inv({a, kD1, 3, 0});
    EXPECT_FALSE(h.l1().find_slot(a, kD1));
    EXPECT_FALSE(h.l2().find(a));
    EXPECT_EQ(h.stats().sfill_l1_propagated, 1u);
    EXPECT_EQ(h.stats().sfill_l2_propagated, 1u);
  }
}

TEST(SFillInv, LaterNonSpeculativeTouchMakesSquashDrop) {
  Hierarchy h(star(ModelKind::StarFarr));
  const Address a = Address::make(0x1000);
  h.access(MemoryRequest::load(a, kD1, true));
  h.access(MemoryRequest::load(a, kD1, false));
  h.sfill_inv({a, kD1, 3, 0});
  EXPECT_TRUE(h.l1().find_slot(a, kD1));
  EXPECT_EQ(h.stats().sfill_l1_propagated, 0u);
}

TEST(SFillInv, SourceTwoAbsentAtL1StopsAfterL2Invalidates) {
  Hierarchy h(star(ModelKind::StarNews, 0));
  const Address a = Address::make(0x40);
  const Address r = Address::make(0x40 + 512 * 64);
  h.access(MemoryRequest::load(a, kD1));
  h.access(MemoryRequest::load(r, kD1, true));  // forwarded, L2 only
  h.sfill_inv({r, kD1, 2, 0});
  EXPECT_EQ(h.stats().sfill_l1_cases[static_cast<int>(SFillInvCase::NotFound)], 1u);
  EXPECT_EQ(h.stats().sfill_l2_cases[static_cast<int>(SFillInvCase::FoundSpeculative)], 1u);
  EXPECT_FALSE(h.l2().find(r));
  EXPECT_EQ(h.stats().sfill_l2_propagated, 0u);
}

TEST(SFillInv, SourceLevelOneIsRejected) {
  Hierarchy h(star(ModelKind::StarFarr));
  EXPECT_THROW(h.sfill_inv({Address::make(0), kD1, 1, 0}), ContractViolation);
}

TEST(SFillInv, BaselineIgnoresRequests) {
  HierarchyConfig c;
  Hierarchy h(c);
  const Address a = Address::make(0x1000);
  h.access(MemoryRequest::load(a, kD1, true));
  h.sfill_inv({a, kD1, 3, 0});
  EXPECT_TRUE(h.l1().find_slot(a, kD1));
  EXPECT_EQ(h.stats().sfill_inv_disabled, 1u);
}

// One-way: the request never produces a response and never removes or
// alters a line whose SpecBit is clear.
TEST(SFillInv, NeverTouchesNonSpeculativeLines) {
  for (ModelKind m : {ModelKind::StarFarr, ModelKind::StarNews}) {
    Hierarchy h(star(m, 2, 5));
    Rng rng(6);
    for (int round = 0; round < 2000; ++round) {
      for (int i = 0; i < 8; ++i) {
        const Address a = Address::make(rng.choose(1024) * 64);
        h.access(MemoryRequest::load(a, DomainId(static_cast<std::uint16_t>(rng.choose(3))), rng.bernoulli(0.5)));
      }
      std::vector<std::pair<Address, DomainId>> safe;
      for (std::uint32_t s = 0; s < h.l1().slot_count(); ++s) {
        const CacheLine& l = h.l1().line_at(s);
        if (l.valid && !l.spec_bit) safe.emplace_back(l.line, l.domain);
      }
      const Address target = Address::make(rng.choose(1024) * 64);
      const DomainId d(static_cast<std::uint16_t>(rng.choose(3)));
      h.sfill_inv({target, d, 2 + static_cast<unsigned>(rng.choose(2)), 0});
      for (const auto& [line, dom] : safe) {
        const auto slot = h.l1().find_slot(line, dom);
        if (!slot) {
          // Only an L2 invalidation of a speculative L2 copy can remove it.
          ASSERT_EQ(line, target);
          ASSERT_FALSE(h.l2().find(line));
        } else {
          ASSERT_FALSE(h.l1().line_at(*slot).spec_bit);
        }
      }
    }
    EXPECT_EQ(h.stats().sfill_inv_responses, 0u);
  }
}

// After squash processing nothing installed by a squashed load survives
// with its SpecBit still set.
TEST(SFillInv, SquashedFillsNeverSurvive) {
  for (ModelKind m : {ModelKind::StarFarr, ModelKind::StarNews}) {
    for (unsigned k : {0u, 4u}) {
      if (m == ModelKind::StarFarr && k != 0) continue;
      Hierarchy h(star(m, k, 11));
      SpecEngine eng(h);
      Rng rng(12 + k);
      for (int round = 0; round < 3000; ++round) {
        eng.issue_load(Address::make(rng.choose(2048) * 64), kD1);
        const RequestId b = eng.issue_barrier();
        RequestId first = 0;
        const int n = 1 + static_cast<int>(rng.choose(4));
        for (int i = 0; i < n; ++i) {
          const DomainId d = rng.bernoulli(0.5) ? kD1 : kD2;
          const RequestId id = eng.issue_load(Address::make(rng.choose(2048) * 64), d, rng.bernoulli(0.9));
          if (first == 0) first = id;
        }
        const SquashReport rep = eng.squash_from(first);
        eng.resolve(b);
        eng.commit_all();
        for (RequestId id : rep.squashed_ids) ASSERT_TRUE(h.speculative_lines_installed_by(id).empty());
      }
    }
  }
}
