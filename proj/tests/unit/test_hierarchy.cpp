#include <gtest/gtest.h>

#include <map>
#include <vector>

#include "starsim/hierarchy.hpp"
#include "starsim/news_cache.hpp"
#include "starsim/rng.hpp"

using namespace starsim;

namespace {

HierarchyConfig config_for(ModelKind m, unsigned k = 0, std::uint64_t seed = 1) {
  HierarchyConfig c;
  c.model = m;
  c.news_k = m == ModelKind::StarNews ? k : 0;
  c.seed = seed;
  c.check_invariants = true;
  return c;
}

const DomainId kD1(1);
const DomainId kD2(2);
const ModelKind kAllModels[] = {ModelKind::SaLru, ModelKind::StarFarr, ModelKind::StarNews};

std::uint8_t byte_at(const Hierarchy& h, Address a) { return h.memory().read_byte(a); }

}  // namespace

TEST(Hierarchy, ColdLoadComesFromMemory) {
  for (ModelKind m : kAllModels) {
    Hierarchy h(config_for(m, 4));
    const MemoryResponse r = h.access(MemoryRequest::load(Address::make(0x1234), kD1));
    EXPECT_EQ(r.source_level, 3u);
    EXPECT_EQ(r.latency_cycles, 1u + 8u + 100u);
    EXPECT_EQ(r.l1_kind, AccessKind::MissFilled);
    const MemoryResponse again = h.access(MemoryRequest::load(Address::make(0x1200), kD1));
    EXPECT_EQ(again.source_level, 1u);
    EXPECT_EQ(again.latency_cycles, 1u);
  }
}

TEST(Hierarchy, LatencyFollowsConfiguredCycles) {
  HierarchyConfig c = config_for(ModelKind::StarFarr);
  c.geometry.l1.hit_cycles = 2;
  c.geometry.l2.hit_cycles = 12;
  c.geometry.memory_latency_cycles = 200;
  Hierarchy h(c);
  EXPECT_EQ(h.access(MemoryRequest::load(Address::make(0x40), kD1)).latency_cycles, 214u);
  EXPECT_EQ(h.access(MemoryRequest::load(Address::make(0x40), kD1)).latency_cycles, 2u);
  EXPECT_EQ(h.access(MemoryRequest::load(Address::make(0x40), kD2)).latency_cycles, 14u);
}

TEST(Hierarchy, L1ConflictVictimIsServedFromL2) {
  Hierarchy h(config_for(ModelKind::SaLru));
  // Three lines in L1 set 0 of a 2-way, 256-set L1.
  const Address a = Address::make(0);
  const Address b = Address::make(256 * 64);
  const Address c = Address::make(512 * 64);
  h.access(MemoryRequest::load(a, kD1));
  h.access(MemoryRequest::load(b, kD1));
  const MemoryResponse rc = h.access(MemoryRequest::load(c, kD1));
  ASSERT_TRUE(rc.l1_victim);
  EXPECT_EQ(*rc.l1_victim, a);
  const MemoryResponse ra = h.access(MemoryRequest::load(a, kD1));
  EXPECT_EQ(ra.source_level, 2u);
  EXPECT_EQ(ra.latency_cycles, 9u);
}

TEST(Hierarchy, NewsForwardNoFillLeavesSpeculativeLineInL2Only) {
  Hierarchy h(config_for(ModelKind::StarNews, 0));
  const Address a = Address::make(0x40);
  const Address r = Address::make(0x40 + (512 * 64));  // same index, different tag
  h.access(MemoryRequest::load(a, kD1));
  const MemoryResponse resp = h.access(MemoryRequest::load(r, kD1, true));
  EXPECT_EQ(resp.l1_kind, AccessKind::MissForwardNoFill);
  EXPECT_EQ(resp.source_level, 3u);
  EXPECT_FALSE(h.l1().find_slot(r, kD1));
  const auto slot = h.l2().find(r);
  ASSERT_TRUE(slot);
  EXPECT_TRUE(h.l2().line_at(*slot).spec_bit);
  EXPECT_EQ(h.stats().forward_nofill, 1u);
}

TEST(Hierarchy, StoreThenLoadHitsWithStoredData) {
  for (ModelKind m : kAllModels) {
    Hierarchy h(config_for(m, 2));
    const std::uint8_t bytes[] = {0xDE, 0xAD};
    h.store(MemoryRequest::store(Address::make(0x1005), kD1), bytes);
    const MemoryResponse r = h.access(MemoryRequest::load(Address::make(0x1000), kD1));
    EXPECT_EQ(r.source_level, 1u);
    EXPECT_EQ(r.data.view()[5], 0xDE);
    EXPECT_EQ(r.data.view()[6], 0xAD);
  }
}

TEST(Hierarchy, StoreRejectsCrossLineAndSpeculativeRequests) {
  Hierarchy h(config_for(ModelKind::SaLru));
  const std::uint8_t bytes[] = {1, 2};
  EXPECT_THROW(h.store(MemoryRequest::store(Address::make(0x3F), kD1), bytes), ContractViolation);
  MemoryRequest spec = MemoryRequest::store(Address::make(0x0), kD1);
  spec.spec_bit = true;
  EXPECT_THROW(h.store(spec, bytes), ContractViolation);
  EXPECT_THROW(h.access(spec), ContractViolation);
}

TEST(Hierarchy, StoreClearsSpecBitSoALaterSquashDrops) {
  Hierarchy h(config_for(ModelKind::StarFarr));
  const Address a = Address::make(0x8000);
  const MemoryResponse r = h.access(MemoryRequest::load(a, kD1, true, 7));
  const std::uint8_t v = 9;
  h.store(MemoryRequest::store(a, kD1), {&v, 1});
  const auto slot = h.l1().find_slot(a, kD1);
  ASSERT_TRUE(slot);
  EXPECT_FALSE(h.l1().line_at(*slot).spec_bit);
  h.sfill_inv({a, kD1, r.source_level, 7});
  EXPECT_EQ(h.stats().sfill_l1_cases[static_cast<int>(SFillInvCase::FoundNonSpeculative)], 1u);
  EXPECT_EQ(h.stats().sfill_l1_propagated, 0u);
  EXPECT_TRUE(h.l1().find_slot(a, kD1));
  EXPECT_EQ(h.access(MemoryRequest::load(a, kD1)).data.view()[0], 9);
}

TEST(Hierarchy, FlushOfAbsentLineChangesNothing) {
  Hierarchy h(config_for(ModelKind::SaLru));
  EXPECT_FALSE(h.flush(Address::make(0x4000), kD1));
  EXPECT_EQ(h.l2().valid_count(), 0u);
}

TEST(Hierarchy, FlushThenReloadMisses) {
  for (ModelKind m : kAllModels) {
    Hierarchy h(config_for(m, 4));
    const Address a = Address::make(0x4000);
    h.access(MemoryRequest::load(a, kD1));
    EXPECT_TRUE(h.flush(a, kD1));
    const MemoryResponse r = h.access(MemoryRequest::load(a, kD1));
    EXPECT_EQ(r.source_level, 3u);
  }
}

TEST(Hierarchy, FlushOfDirtyLineUpdatesMemory) {
  for (ModelKind m : kAllModels) {
    Hierarchy h(config_for(m, 4));
    const Address a = Address::make(0x4010);
    const std::uint8_t v = 0x5A;
    h.store(MemoryRequest::store(a, kD1), {&v, 1});
    EXPECT_EQ(byte_at(h, a), 0);
    EXPECT_TRUE(h.flush(a, kD1));
    EXPECT_EQ(byte_at(h, a), 0x5A);
  }
}

TEST(Hierarchy, CrossDomainFlushDoesNotEvictOnStar) {
  for (ModelKind m : {ModelKind::StarFarr, ModelKind::StarNews}) {
    Hierarchy h(config_for(m, 4));
    const Address a = Address::make(0x4000);
    h.access(MemoryRequest::load(a, kD2));
    EXPECT_FALSE(h.flush(a, kD1));
    EXPECT_EQ(h.access(MemoryRequest::load(a, kD2)).source_level, 1u);
  }
}

TEST(Hierarchy, CrossDomainFlushEvictsOnBaseline) {
  Hierarchy h(config_for(ModelKind::SaLru));
  const Address a = Address::make(0x4000);
  h.access(MemoryRequest::load(a, kD2));
  EXPECT_TRUE(h.flush(a, kD1));
  EXPECT_EQ(h.access(MemoryRequest::load(a, kD2)).source_level, 3u);
}

TEST(Hierarchy, OtherDomainSeesDirtyDataOnStar) {
  for (ModelKind m : {ModelKind::StarFarr, ModelKind::StarNews}) {
    Hierarchy h(config_for(m, 4));
    const Address a = Address::make(0x9000);
    const std::uint8_t v = 0x77;
    h.store(MemoryRequest::store(a, kD1), {&v, 1});
    const MemoryResponse r = h.access(MemoryRequest::load(a, kD2));
    EXPECT_EQ(r.source_level, 2u);
    EXPECT_EQ(r.data.view()[0], 0x77);
  }
}

// Independent byte-level reference: the last store to each byte wins.
TEST(Hierarchy, DrainedMemoryMatchesReferenceModel) {
  for (ModelKind m : kAllModels) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      HierarchyConfig c = config_for(m, 2, seed);
      c.check_invariants = false;
      Hierarchy h(c);
      std::map<std::uint64_t, std::uint8_t> ref;
      Rng rng(seed * 31 + static_cast<std::uint64_t>(m));
      for (int i = 0; i < 30000; ++i) {
        // 8192 lines over 3 domains overflows both L1 and L2.
        const std::uint64_t addr = rng.choose(8192) * 64 + rng.choose(64);
        const DomainId d(static_cast<std::uint16_t>(rng.choose(3)));
        if (rng.bernoulli(0.3)) {
          const std::uint8_t v = static_cast<std::uint8_t>(rng.next());
          h.store(MemoryRequest::store(Address::make(addr), d), {&v, 1});
          ref[addr] = v;
        } else {
          const MemoryResponse r = h.access(MemoryRequest::load(Address::make(addr), d, rng.bernoulli(0.2)));
          const auto it = ref.find(addr);
          ASSERT_EQ(r.data.view()[addr % 64], it == ref.end() ? 0 : it->second);
        }
      }
      h.drain();
      EXPECT_EQ(h.l2().valid_count(), 0u);
      EXPECT_EQ(h.l1().valid_count(), 0u);
      FlatMemory expected(64);
      for (const auto& [a, v] : ref) expected.write_bytes(Address::make(a), {&v, 1});
      EXPECT_TRUE(h.memory().same_contents(expected)) << to_string(m) << " seed " << seed;
    }
  }
}

TEST(Hierarchy, InclusionHoldsAfterEveryOperation) {
  for (ModelKind m : kAllModels) {
    HierarchyConfig c = config_for(m, 3, 9);
    c.geometry.l2 = {1024, 4, 8};  // small L2 forces back-invalidation
    Hierarchy h(c);
    Rng rng(10);
    for (int i = 0; i < 20000; ++i) {
      const Address a = Address::make(rng.choose(4096) * 64);
      const DomainId d(static_cast<std::uint16_t>(rng.choose(4)));
      const double p = rng.uniform01();
      if (p < 0.1) {
        h.flush(a, d);
      } else if (p < 0.25) {
        const std::uint8_t v = 1;
        h.store(MemoryRequest::store(a, d), {&v, 1});
      } else if (p < 0.3 && h.sfill_inv_enabled()) {
        h.sfill_inv({a, d, 2 + static_cast<unsigned>(rng.choose(2)), 0});
      } else {
        h.access(MemoryRequest::load(a, d, rng.bernoulli(0.3)));
      }
      ASSERT_NO_THROW(h.check_invariants());
    }
    EXPECT_GT(h.stats().back_invalidations, 0u);
  }
}

TEST(Hierarchy, NoHitForAnyStarSequence) {
  for (ModelKind m : {ModelKind::StarFarr, ModelKind::StarNews}) {
    Hierarchy h(config_for(m, 2, 4));
    Rng rng(12);
    for (int i = 0; i < 20000; ++i) {
      const Address a = Address::make(rng.choose(2048) * 64);
      const DomainId d(static_cast<std::uint16_t>(rng.choose(4)));
      const auto before = h.l1().find_slot(a, d);
      const MemoryResponse r = h.access(MemoryRequest::load(a, d, rng.bernoulli(0.3)));
      if (r.l1_kind == AccessKind::Hit) {
        ASSERT_TRUE(before);
        ASSERT_EQ(h.l1().line_at(*before).domain, d);
      }
    }
  }
}

TEST(Hierarchy, SpecBitNeverSetOnReuse) {
  Hierarchy h(config_for(ModelKind::StarFarr));
  const Address a = Address::make(0x100);
  h.access(MemoryRequest::load(a, kD1));
  h.access(MemoryRequest::load(a, kD1, true));
  EXPECT_FALSE(h.l1().line_at(*h.l1().find_slot(a, kD1)).spec_bit);
}

TEST(Hierarchy, ClearingSpecBitAtL1AlsoClearsL2) {
  Hierarchy h(config_for(ModelKind::StarFarr));
  const Address a = Address::make(0x100);
  h.access(MemoryRequest::load(a, kD1, true));
  EXPECT_TRUE(h.l2().line_at(*h.l2().find(a)).spec_bit);
  h.access(MemoryRequest::load(a, kD1));
  EXPECT_FALSE(h.l2().line_at(*h.l2().find(a)).spec_bit);
}

TEST(Hierarchy, KRejectedForNonNewsModels) {
  HierarchyConfig c;
  c.model = ModelKind::StarFarr;
  c.news_k = 2;
  EXPECT_THROW(Hierarchy{c}, ConfigError);
  c.model = ModelKind::StarNews;
  c.news_k = 17;
  EXPECT_THROW(Hierarchy{c}, ConfigError);
}

TEST(Mshr, MergesOnlyWhenLineAndDomainMatch) {
  Mshr m(4);
  const Address a = Address::make(0x40);
  EXPECT_FALSE(m.allocate(a, kD1, 1).merged);
  EXPECT_FALSE(m.allocate(a, kD2, 2).merged);
  EXPECT_TRUE(m.allocate(a, kD1, 3).merged);
  EXPECT_EQ(m.in_flight(), 2u);
  EXPECT_EQ(m.release(a, kD1), (std::vector<RequestId>{1, 3}));
  EXPECT_EQ(m.release(a, kD2), (std::vector<RequestId>{2}));
  EXPECT_TRUE(m.release(a, kD2).empty());
}

TEST(Mshr, FullMshrStallsInsteadOfRejecting) {
  Mshr m(2, 3);
  EXPECT_EQ(m.allocate(Address::make(0x0), kD1, 1).stall_cycles, 0u);
  EXPECT_EQ(m.allocate(Address::make(0x40), kD1, 2).stall_cycles, 0u);
  EXPECT_EQ(m.allocate(Address::make(0x80), kD1, 3).stall_cycles, 3u);
  EXPECT_EQ(m.in_flight(), 2u);
  EXPECT_EQ(m.stats().stalls, 1u);
  EXPECT_THROW(Mshr(0), ConfigError);
}
