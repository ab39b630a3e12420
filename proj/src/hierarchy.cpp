#include "starsim/hierarchy.hpp"

#include <algorithm>
#include <string>

namespace starsim {

void HierarchyConfig::validate() const {
  geometry.validate();
  if (news_k > kMaxExtraIndexBits) throw ConfigError("k must be within 0..16");
  if (news_k != 0 && model != ModelKind::StarNews) {
    throw ConfigError("k only applies to star-news (got model " + std::string(to_string(model)) + ")");
  }
  if (mshr_entries == 0) throw ConfigError("MSHR needs at least one entry");
}

class Hierarchy::Port final : public NextLevel {
 public:
  explicit Port(Hierarchy& h) : h_(h) {}
  Fill fetch(const MemoryRequest& req) override { return h_.fetch(req); }

 private:
  Hierarchy& h_;
};

namespace {

HierarchyConfig checked(const HierarchyConfig& c) {
  c.validate();
  return c;
}

}  // namespace

Hierarchy::Hierarchy(const HierarchyConfig& config)
    : config_(checked(config)),
      l1_(make_l1(config.model, config.geometry, config.news_k, Rng(config.seed), config.fault)),
      l2_(config.geometry),
      memory_(config.geometry.line_size_bytes),
      mshr_(config.mshr_entries),
      port_(std::make_unique<Port>(*this)) {
  scratch_.size = config.geometry.line_size_bytes;
}

Hierarchy::~Hierarchy() = default;

bool Hierarchy::sfill_inv_enabled() const noexcept { return l1_->kind() != ModelKind::SaLru; }

void Hierarchy::write_back_to_l2(const EvictedLine& ev) {
  if (const auto slot = l2_.find(ev.line)) {
    const auto src = ev.data.view();
    std::copy(src.begin(), src.end(), l2_.data_at(*slot).begin());
    l2_.line_at(*slot).dirty = true;
    ++stats_.l1_writebacks;
  } else {
    memory_.write_line(ev.line, ev.data.view());
    ++stats_.memory_writebacks;
  }
}

void Hierarchy::evict_from_l2(const EvictedLine& ev) {
  // L1 data is never older than L2 data, so it is written last.
  if (ev.dirty) {
    memory_.write_line(ev.line, ev.data.view());
    ++stats_.memory_writebacks;
  }
  for (const EvictedLine& copy : l1_->invalidate_all_copies(ev.line)) {
    ++stats_.back_invalidations;
    if (copy.dirty) {
      memory_.write_line(copy.line, copy.data.view());
      ++stats_.memory_writebacks;
    }
  }
}

Fill Hierarchy::fetch(const MemoryRequest& req) {
  const Address line = line_of(req.addr, geometry().line_size_bytes);

  // Another domain's dirty copy must reach L2 before this domain reads it.
  if (l1_->domain_isolated()) {
    for (std::uint32_t slot : l1_->copies_of(line)) {
      CacheLine& copy = l1_->line_at(slot);
      if (!copy.dirty) continue;
      const auto l2_slot = l2_.find(line);
      if (!l2_slot) throw ContractViolation("inclusion broken: dirty L1 line missing from L2");
      const auto src = l1_->data_at(slot);
      std::copy(src.begin(), src.end(), l2_.data_at(*l2_slot).begin());
      l2_.line_at(*l2_slot).dirty = true;
      copy.dirty = false;
      ++stats_.coherence_writebacks;
    }
  }

  const Mshr::Allocation alloc = mshr_.allocate(line, req.domain, req.id);
  Fill fill;
  if (const auto slot = l2_.find(line)) {
    l2_.touch(*slot);
    CacheLine& l = l2_.line_at(*slot);
    if (!req.spec_bit && l.spec_bit) {
      l.spec_bit = false;
      ++l2_.stats().spec_bits_cleared;
    }
    ++l2_.stats().hits;
    ++stats_.l2_hits;
    fill = {l2_.data_at(*slot), 2, geometry().l2.hit_cycles};
  } else {
    ++l2_.stats().misses;
    ++stats_.memory_fills;
    memory_.read_line(line, scratch_.view());
    L2Cache::Installed ins = l2_.install(line, req, scratch_.view());
    if (ins.evicted) evict_from_l2(*ins.evicted);
    fill = {l2_.data_at(ins.slot), 3, geometry().l2.hit_cycles + geometry().memory_latency_cycles};
  }
  fill.latency_cycles += alloc.stall_cycles;
  mshr_.release(line, req.domain);
  return fill;
}

MemoryResponse Hierarchy::access(const MemoryRequest& req) {
  if (req.op == MemOp::Flush) throw ContractViolation("use Hierarchy::flush for FLUSH requests");
  if (req.op == MemOp::Store && req.spec_bit) throw ContractViolation("stores are never speculative");
  if (req.op == MemOp::Load) ++stats_.loads;

  AccessOutcome out = l1_->access(req, *port_);
  if (out.evicted && out.evicted->dirty) write_back_to_l2(*out.evicted);
  if (out.spec_cleared) {
    if (const auto slot = l2_.find(line_of(req.addr, geometry().line_size_bytes))) {
      CacheLine& l = l2_.line_at(*slot);
      if (l.spec_bit) {
        l.spec_bit = false;
        ++l2_.stats().spec_bits_cleared;
      }
    }
  }
  if (out.kind == AccessKind::Hit) ++stats_.l1_hits;
  if (out.kind == AccessKind::MissForwardNoFill) ++stats_.forward_nofill;

  MemoryResponse r;
  r.data = out.data;
  r.latency_cycles = out.latency_cycles;
  r.source_level = out.source_level;
  r.l1_kind = out.kind;
  r.l1_victim = out.victim_evicted();
  r.random_victim_slot = out.random_victim_slot;
  maybe_check();
  return r;
}

MemoryResponse Hierarchy::store(const MemoryRequest& req, std::span<const std::uint8_t> bytes) {
  if (req.op != MemOp::Store || req.spec_bit) throw ContractViolation("store() needs a non-speculative STORE");
  const std::uint32_t ls = geometry().line_size_bytes;
  const std::uint64_t offset = req.addr.value() & (ls - 1);
  if (offset + bytes.size() > ls) throw ContractViolation("store crosses a line boundary");
  ++stats_.stores;

  const Address line = line_of(req.addr, ls);
  if (l1_->domain_isolated()) {
    for (const EvictedLine& ev : l1_->invalidate_other_domains(line, req.domain)) {
      if (ev.dirty) write_back_to_l2(ev);
    }
  }
  MemoryResponse r = access(req);
  const auto slot = l1_->find_slot(line, req.domain);
  if (!slot) throw ContractViolation("store did not allocate its line in L1");
  auto data = l1_->data_at(*slot);
  std::copy(bytes.begin(), bytes.end(), data.begin() + static_cast<std::ptrdiff_t>(offset));
  CacheLine& l = l1_->line_at(*slot);
  l.dirty = true;
  l.spec_bit = false;
  r.data.assign(data);
  maybe_check();
  return r;
}

bool Hierarchy::flush(Address addr, DomainId domain) {
  ++stats_.flushes;
  const Address line = line_of(addr, geometry().line_size_bytes);
  bool flushed = false;
  if (auto ev = l1_->flush(line, domain)) {
    flushed = true;
    if (ev->dirty) write_back_to_l2(*ev);
  }
  if (const auto slot = l2_.find(line)) {
    const bool owner = !l1_->domain_isolated() || l2_.line_at(*slot).domain == domain;
    if (owner && l1_->copies_of(line).empty()) {
      evict_from_l2(l2_.remove(*slot));
      flushed = true;
    } else if (l2_.line_at(*slot).dirty) {
      // The line stays cached for other domains but memory is brought up to date.
      memory_.write_line(line, l2_.data_at(*slot));
      l2_.line_at(*slot).dirty = false;
      ++stats_.memory_writebacks;
    }
  }
  maybe_check();
  return flushed;
}

void Hierarchy::sfill_inv(const SFillInvRequest& req) {
  ++stats_.sfill_inv_received;
  if (!sfill_inv_enabled()) {
    ++stats_.sfill_inv_disabled;
    return;
  }
  if (req.source_level < 2 || req.source_level > 3) {
    throw ContractViolation("SFill-Inv source level must be 2 or 3");
  }
  const SFillInvResult at_l1 = l1_->handle_sfill_inv(req);
  ++stats_.sfill_l1_cases[static_cast<std::size_t>(at_l1.found)];
  if (at_l1.action == SFillInvAction::Propagate) {
    ++stats_.sfill_l1_propagated;
    const Address line = line_of(req.addr, geometry().line_size_bytes);
    const auto slot = l2_.find(line);
    SFillInvCase found = SFillInvCase::NotFound;
    if (slot) {
      found = l2_.line_at(*slot).spec_bit ? SFillInvCase::FoundSpeculative : SFillInvCase::FoundNonSpeculative;
    }
    ++stats_.sfill_l2_cases[static_cast<std::size_t>(found)];
    if (found == SFillInvCase::FoundSpeculative) evict_from_l2(l2_.remove(*slot));
    // Memory keeps no speculative state, so propagation past L2 ends here.
    if (decide_sfill_inv(found, req.source_level, 2).action == SFillInvAction::Propagate) {
      ++stats_.sfill_l2_propagated;
    }
  }
  maybe_check();
}

void Hierarchy::clear_spec_bit(Address addr, DomainId domain) {
  const Address line = line_of(addr, geometry().line_size_bytes);
  l1_->clear_spec_bit(line, domain);
  if (const auto slot = l2_.find(line)) l2_.line_at(*slot).spec_bit = false;
}

void Hierarchy::drain() {
  for (const EvictedLine& ev : l1_->evict_all()) {
    if (ev.dirty) write_back_to_l2(ev);
  }
  for (std::uint32_t slot = 0; slot < l2_.slot_count(); ++slot) {
    if (!l2_.line_at(slot).valid) continue;
    const EvictedLine ev = l2_.remove(slot);
    if (ev.dirty) {
      memory_.write_line(ev.line, ev.data.view());
      ++stats_.memory_writebacks;
    }
  }
  mshr_.retire_all();
}

void Hierarchy::check_invariants() const {
  for (std::uint32_t slot = 0; slot < l1_->slot_count(); ++slot) {
    const CacheLine& l = l1_->line_at(slot);
    if (!l.valid) continue;
    if (!l2_.find(l.line)) throw ContractViolation("inclusion violated: L1 line absent from L2");
    if (l.spec_bit && l.dirty) throw ContractViolation("L1 line is both speculative and dirty");
    if (l1_->domain_isolated() && l.domain.is_none()) throw ContractViolation("STAR L1 line has no domain");
  }
  for (std::uint32_t slot = 0; slot < l2_.slot_count(); ++slot) {
    const CacheLine& l = l2_.line_at(slot);
    if (l.valid && l.spec_bit && l.dirty) throw ContractViolation("L2 line is both speculative and dirty");
  }
}

void Hierarchy::maybe_check() const {
  if (config_.check_invariants) check_invariants();
}

std::vector<Address> Hierarchy::speculative_lines_installed_by(RequestId id) const {
  std::vector<Address> out;
  for (std::uint32_t slot = 0; slot < l1_->slot_count(); ++slot) {
    const CacheLine& l = l1_->line_at(slot);
    if (l.valid && l.spec_bit && l.installed_by == id) out.push_back(l.line);
  }
  for (std::uint32_t slot = 0; slot < l2_.slot_count(); ++slot) {
    const CacheLine& l = l2_.line_at(slot);
    if (l.valid && l.spec_bit && l.installed_by == id) out.push_back(l.line);
  }
  return out;
}

}  // namespace starsim
