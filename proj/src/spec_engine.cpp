#include "starsim/spec_engine.hpp"

#include <algorithm>
#include <string>

namespace starsim {

SpecEngine::SpecEngine(Hierarchy& hierarchy, SpecEngineConfig config) : h_(hierarchy), config_(config) {
  if (config_.capacity == 0) throw ConfigError("speculation window needs at least one entry");
}

bool SpecEngine::older_unresolved() const noexcept {
  return std::any_of(window_.begin(), window_.end(), [](const WindowEntry& e) {
    return (e.kind == EntryKind::Barrier && !e.resolved) || (e.kind == EntryKind::Load && !e.executed);
  });
}

std::size_t SpecEngine::position(RequestId id) const {
  // Ids increase monotonically through the window.
  const auto it = std::lower_bound(window_.begin(), window_.end(), id,
                                   [](const WindowEntry& e, RequestId v) { return e.id < v; });
  if (it == window_.end() || it->id != id) {
    throw ContractViolation("request " + std::to_string(id) + " is not in the window");
  }
  return static_cast<std::size_t>(it - window_.begin());
}

const WindowEntry* SpecEngine::find(RequestId id) const {
  const auto it = std::lower_bound(window_.begin(), window_.end(), id,
                                   [](const WindowEntry& e, RequestId v) { return e.id < v; });
  return it != window_.end() && it->id == id ? &*it : nullptr;
}

void SpecEngine::make_room() {
  if (window_.size() < config_.capacity) return;
  commit_head();
  ++stats_.eager_commits;
}

void SpecEngine::run_load(WindowEntry& e) {
  e.response = h_.access(MemoryRequest::load(e.addr, e.domain, e.spec_bit, e.id));
  e.executed = true;
}

RequestId SpecEngine::issue_load(Address addr, DomainId domain, bool execute_now) {
  make_room();
  WindowEntry e;
  e.id = next_id_++;
  e.kind = EntryKind::Load;
  e.addr = addr;
  e.domain = domain;
  e.spec_bit = older_unresolved();
  ++stats_.loads_issued;
  if (e.spec_bit) ++stats_.spec_loads;
  window_.push_back(std::move(e));
  if (execute_now) run_load(window_.back());
  return window_.back().id;
}

RequestId SpecEngine::issue_store(Address addr, DomainId domain, std::vector<std::uint8_t> bytes) {
  make_room();
  WindowEntry e;
  e.id = next_id_++;
  e.kind = EntryKind::Store;
  e.addr = addr;
  e.domain = domain;
  e.store_bytes = std::move(bytes);
  window_.push_back(std::move(e));
  return window_.back().id;
}

RequestId SpecEngine::issue_barrier() {
  make_room();
  WindowEntry e;
  e.id = next_id_++;
  e.kind = EntryKind::Barrier;
  window_.push_back(std::move(e));
  return window_.back().id;
}

const MemoryResponse& SpecEngine::execute(RequestId id) {
  WindowEntry& e = window_[position(id)];
  if (e.kind != EntryKind::Load) throw ContractViolation("only loads execute out of the window");
  if (!e.executed) run_load(e);
  return *e.response;
}

void SpecEngine::resolve(RequestId id) {
  WindowEntry& e = window_[position(id)];
  if (e.kind != EntryKind::Barrier) throw ContractViolation("only barriers resolve");
  e.resolved = true;
}

void SpecEngine::commit_head() {
  if (window_.empty()) throw ContractViolation("commit on an empty window");
  WindowEntry& e = window_.front();
  switch (e.kind) {
    case EntryKind::Barrier:
      if (!e.resolved) throw ContractViolation("commit past an unresolved barrier");
      break;
    case EntryKind::Load:
      if (!e.executed) throw ContractViolation("commit past an unexecuted load");
      if (config_.clear_specbit_on_commit && e.spec_bit) h_.clear_spec_bit(e.addr, e.domain);
      ++stats_.loads_committed;
      break;
    case EntryKind::Store:
      h_.store(MemoryRequest::store(e.addr, e.domain, e.id), e.store_bytes);
      ++stats_.stores_committed;
      break;
  }
  window_.pop_front();
}

void SpecEngine::resolve_to(RequestId id) {
  const std::size_t pos = position(id);
  for (std::size_t i = 0; i <= pos; ++i) commit_head();
}

void SpecEngine::commit_all() {
  while (!window_.empty()) commit_head();
}

SquashReport SpecEngine::squash_from(RequestId id) {
  const std::size_t pos = position(id);
  SquashReport report;
  for (std::size_t i = pos; i < window_.size(); ++i) {
    const WindowEntry& e = window_[i];
    if (e.kind != EntryKind::Load) continue;
    ++report.loads_squashed;
    report.squashed_ids.push_back(e.id);
    if (!e.executed) {
      ++report.sfill_inv_skipped_unexecuted;
    } else if (e.response->source_level == 1) {
      ++report.sfill_inv_skipped_l1hit;
    } else if (!h_.sfill_inv_enabled()) {
      ++report.sfill_inv_disabled;
    } else {
      h_.sfill_inv({e.addr, e.domain, e.response->source_level, e.id});
      ++report.sfill_inv_sent;
    }
  }
  window_.erase(window_.begin() + static_cast<std::ptrdiff_t>(pos), window_.end());
  stats_.loads_squashed += report.loads_squashed;
  stats_.sfill_inv_sent += report.sfill_inv_sent;
  stats_.sfill_inv_skipped_l1hit += report.sfill_inv_skipped_l1hit;
  stats_.sfill_inv_skipped_unexecuted += report.sfill_inv_skipped_unexecuted;
  stats_.sfill_inv_disabled += report.sfill_inv_disabled;
  return report;
}

}  // namespace starsim
