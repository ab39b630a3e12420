#include "starsim/selftest.hpp"

#include <set>
#include <sstream>

#include "starsim/hierarchy.hpp"
#include "starsim/news_cache.hpp"
#include "starsim/spec_engine.hpp"
#include "starsim/stats.hpp"

namespace starsim {

namespace {

constexpr double kUniformityAlpha = 0.001;

HierarchyConfig config_for(ModelKind m, std::uint64_t seed, FaultInjection fault, unsigned k = 0) {
  HierarchyConfig c;
  c.model = m;
  c.news_k = m == ModelKind::StarNews ? k : 0;
  c.seed = seed;
  c.fault = fault;
  return c;
}

Address line_addr(std::uint64_t n) { return Address::make(0x1000000 + n * 64); }

SelfTestCheck uniformity(ModelKind m, std::uint64_t seed, FaultInjection fault) {
  const auto hist = replacement_histogram(m, 20000, seed * 3 + static_cast<std::uint64_t>(m), fault);
  const ChiSquareResult r = chi_square_uniform(hist);
  std::ostringstream d;
  d << "chi2=" << r.statistic << " p=" << r.p_value;
  return {std::string(to_string(m)) + " replacement uniformity", r.p_value > kUniformityAlpha, d.str()};
}

SelfTestCheck inclusion(ModelKind m, std::uint64_t seed, FaultInjection fault) {
  HierarchyConfig c = config_for(m, seed, fault, 2);
  c.check_invariants = true;
  Hierarchy h(c);
  SpecEngine engine(h);
  Rng rng(seed ^ 0x1c);
  try {
    for (int i = 0; i < 4000; ++i) {
      const Address a = line_addr(rng.choose(6000));
      const DomainId d(static_cast<std::uint16_t>(rng.choose(3)));
      switch (rng.choose(6)) {
        case 0: h.store(MemoryRequest::store(a, d), std::vector<std::uint8_t>{1}); break;
        case 1: h.flush(a, d); break;
        case 2: {
          const RequestId b = engine.issue_barrier();
          const RequestId l = engine.issue_load(a, d);
          engine.issue_load(line_addr(rng.choose(6000)), d);
          engine.squash_from(l);
          engine.resolve(b);
          engine.commit_all();
          break;
        }
        default: h.access(MemoryRequest::load(a, d)); break;
      }
    }
  } catch (const ContractViolation& e) {
    return {std::string(to_string(m)) + " inclusion", false, e.what()};
  }
  return {std::string(to_string(m)) + " inclusion", true, "4000 operations"};
}

SelfTestCheck nohit(ModelKind m, std::uint64_t seed, FaultInjection fault) {
  Hierarchy h(config_for(m, seed, fault, 4));
  Rng rng(seed ^ 0x40);
  std::set<std::pair<std::uint64_t, std::uint16_t>> touched;
  std::uint64_t violations = 0;
  for (int i = 0; i < 20000; ++i) {
    const Address a = line_addr(rng.choose(64));
    const DomainId d(static_cast<std::uint16_t>(rng.choose(4)));
    const MemoryResponse r = h.access(MemoryRequest::load(a, d));
    const auto key = std::make_pair(a.value(), d.value());
    if (r.l1_kind == AccessKind::Hit && !touched.count(key)) ++violations;
    touched.insert(key);
  }
  return {std::string(to_string(m)) + " NoHit", violations == 0, std::to_string(violations) + " cross-domain hits"};
}

/// Builds the found-state at L1 and L2, delivers one SFill-Inv, and checks
/// the resulting residency against the three-case rule.
SelfTestCheck sfill_table(std::uint64_t seed, FaultInjection fault) {
  const DomainId d(1);
  int failures = 0;
  int cases = 0;
  enum class State { NonSpec, Spec, Absent };
  for (State st : {State::NonSpec, State::Spec, State::Absent}) {
    for (unsigned source : {2u, 3u}) {
      ++cases;
      Hierarchy h(config_for(ModelKind::StarFarr, seed, fault));
      const Address a = line_addr(7);
      if (st != State::Absent) h.access(MemoryRequest::load(a, d, st == State::Spec, 99));
      const bool l1_before = h.l1().find_slot(a, d).has_value();
      const bool l2_before = h.l2().find(a).has_value();
      h.sfill_inv({a, d, source, 99});
      const bool l1_after = h.l1().find_slot(a, d).has_value();
      const bool l2_after = h.l2().find(a).has_value();
      bool ok = true;
      switch (st) {
        case State::NonSpec: ok = l1_after == l1_before && l2_after == l2_before; break;
        case State::Spec: ok = !l1_after && !l2_after; break;
        case State::Absent: ok = !l1_after && !l2_after && h.stats().sfill_l1_propagated == 1; break;
      }
      ok = ok && h.stats().sfill_inv_responses == 0;
      if (!ok) ++failures;
    }
  }
  return {"SFill-Inv case table", failures == 0,
          std::to_string(cases - failures) + "/" + std::to_string(cases) + " cases"};
}

SelfTestCheck flat_memory(ModelKind m, std::uint64_t seed, FaultInjection fault) {
  Hierarchy h(config_for(m, seed, fault, 2));
  FlatMemory reference(64);
  Rng rng(seed ^ 0xf1);
  for (int i = 0; i < 20000; ++i) {
    const Address a = Address::make(0x2000000 + rng.choose(8192) * 64 + rng.choose(64));
    const DomainId d(static_cast<std::uint16_t>(rng.choose(2)));
    if (rng.bernoulli(0.4)) {
      const std::uint8_t v = static_cast<std::uint8_t>(rng.next());
      h.store(MemoryRequest::store(a, d), std::span<const std::uint8_t>(&v, 1));
      reference.write_bytes(a, std::span<const std::uint8_t>(&v, 1));
    } else if (rng.bernoulli(0.05)) {
      h.flush(a, d);
    } else {
      h.access(MemoryRequest::load(a, d));
    }
  }
  h.drain();
  return {std::string(to_string(m)) + " FlatMemory oracle", h.memory().same_contents(reference),
          std::to_string(reference.lines_written()) + " lines written"};
}

/// A speculative mapping-hit/tag-miss must not install R; it evicts a random
/// line, which is the conflicting line C only by chance.
SelfTestCheck news_forward_nofill(std::uint64_t seed, FaultInjection fault) {
  int installed = 0;
  int conflicting_evicted = 0;
  constexpr int kTrials = 256;
  for (int t = 0; t < kTrials; ++t) {
    Hierarchy h(config_for(ModelKind::StarNews, seed + static_cast<std::uint64_t>(t), fault, 0));
    const DomainId d(1);
    for (std::uint64_t n = 0; n < 512; ++n) h.access(MemoryRequest::load(line_addr(n), d));
    const Address c = line_addr(5);
    const Address r = line_addr(5 + 512);
    h.access(MemoryRequest::load(r, d, /*spec=*/true));
    if (h.l1().find_slot(r, d)) ++installed;
    if (!h.l1().find_slot(c, d)) ++conflicting_evicted;
  }
  std::ostringstream detail;
  detail << "R installed " << installed << "/" << kTrials << ", C evicted " << conflicting_evicted << "/" << kTrials;
  return {"NEWS speculative tag miss forwards without fill", installed == 0 && conflicting_evicted <= 16,
          detail.str()};
}

}  // namespace

std::vector<std::uint64_t> replacement_histogram(ModelKind model, std::uint64_t events, std::uint64_t seed,
                                                 FaultInjection fault) {
  // k = 6 keeps NEWS on the mapping-miss path for this address pattern.
  Hierarchy h(config_for(model, seed, fault, 6));
  const DomainId d(1);
  const std::uint32_t slots = h.l1().slot_count();
  for (std::uint64_t n = 0; n < slots; ++n) h.access(MemoryRequest::load(line_addr(n), d));
  std::vector<std::uint64_t> hist(slots, 0);
  std::uint64_t next = slots;
  std::uint64_t seen = 0;
  while (seen < events) {
    const MemoryResponse r = h.access(MemoryRequest::load(line_addr(next++), d));
    if (r.random_victim_slot) {
      ++hist[*r.random_victim_slot];
      ++seen;
    }
  }
  return regroup(hist, 16);
}

std::vector<SelfTestCheck> run_selftest(FaultInjection fault, std::uint64_t seed) {
  std::vector<SelfTestCheck> out;
  out.push_back(uniformity(ModelKind::StarFarr, seed, fault));
  out.push_back(uniformity(ModelKind::StarNews, seed, fault));
  for (ModelKind m : {ModelKind::SaLru, ModelKind::StarFarr, ModelKind::StarNews}) out.push_back(inclusion(m, seed, fault));
  for (ModelKind m : {ModelKind::StarFarr, ModelKind::StarNews}) out.push_back(nohit(m, seed, fault));
  out.push_back(sfill_table(seed, fault));
  for (ModelKind m : {ModelKind::SaLru, ModelKind::StarFarr, ModelKind::StarNews}) out.push_back(flat_memory(m, seed, fault));
  out.push_back(news_forward_nofill(seed, fault));
  return out;
}

}  // namespace starsim
