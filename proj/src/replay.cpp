#include "starsim/replay.hpp"

#include <iomanip>
#include <optional>
#include <ostream>

namespace starsim {

double ReplayStats::squashed_load_fraction() const noexcept {
  return spec_loads == 0 ? 0.0 : static_cast<double>(loads_squashed) / static_cast<double>(spec_loads);
}

ReplayStats& ReplayStats::operator+=(const ReplayStats& o) noexcept {
  loads += o.loads;
  stores += o.stores;
  l1_hits += o.l1_hits;
  l1_miss_l2 += o.l1_miss_l2;
  l1_miss_mem += o.l1_miss_mem;
  spec_loads += o.spec_loads;
  loads_squashed += o.loads_squashed;
  sfill_inv_sent += o.sfill_inv_sent;
  sfill_inv_skipped_l1hit += o.sfill_inv_skipped_l1hit;
  sfill_inv_skipped_unexecuted += o.sfill_inv_skipped_unexecuted;
  sfill_inv_dropped_case_i += o.sfill_inv_dropped_case_i;
  tagmiss_forward_nofill += o.tagmiss_forward_nofill;
  total_latency_cycles += o.total_latency_cycles;
  return *this;
}

std::vector<std::pair<std::string, std::string>> ReplayStats::fields() const {
  auto n = [](std::uint64_t v) { return std::to_string(v); };
  return {
      {"loads", n(loads)},
      {"stores", n(stores)},
      {"l1_hits", n(l1_hits)},
      {"l1_miss_l2", n(l1_miss_l2)},
      {"l1_miss_mem", n(l1_miss_mem)},
      {"spec_loads", n(spec_loads)},
      {"loads_squashed", n(loads_squashed)},
      {"sfill_inv_sent", n(sfill_inv_sent)},
      {"sfill_inv_skipped_l1hit", n(sfill_inv_skipped_l1hit)},
      {"sfill_inv_skipped_unexecuted", n(sfill_inv_skipped_unexecuted)},
      {"sfill_inv_dropped_case_i", n(sfill_inv_dropped_case_i)},
      {"tagmiss_forward_nofill", n(tagmiss_forward_nofill)},
      {"total_latency_cycles", n(total_latency_cycles)},
      {"squashed_load_fraction", format_number(squashed_load_fraction())},
  };
}

namespace {

class Replayer {
 public:
  explicit Replayer(const ReplayConfig& config) : h_(config.hierarchy), engine_(h_, config.engine) {}

  void run(const std::vector<TraceEvent>& events) {
    for (const TraceEvent& ev : events) step(ev);
    engine_.commit_all();
    const HierarchyStats& hs = h_.stats();
    const SpecEngineStats& es = engine_.stats();
    stats_.spec_loads = es.spec_loads;
    stats_.loads_squashed = es.loads_squashed;
    stats_.sfill_inv_sent = es.sfill_inv_sent;
    stats_.sfill_inv_skipped_l1hit = es.sfill_inv_skipped_l1hit;
    stats_.sfill_inv_skipped_unexecuted = es.sfill_inv_skipped_unexecuted;
    constexpr auto kCaseI = static_cast<std::size_t>(SFillInvCase::FoundNonSpeculative);
    stats_.sfill_inv_dropped_case_i = hs.sfill_l1_cases[kCaseI] + hs.sfill_l2_cases[kCaseI];
    stats_.stores = es.stores_committed;
  }

  const ReplayStats& stats() const noexcept { return stats_; }

 private:
  DomainId domain_of(const TraceEvent& ev) const { return ev.domain.value_or(current_); }

  void tally(RequestId id) {
    const MemoryResponse& r = *engine_.find(id)->response;
    ++stats_.loads;
    stats_.total_latency_cycles += r.latency_cycles;
    switch (r.source_level) {
      case 1: ++stats_.l1_hits; break;
      case 2: ++stats_.l1_miss_l2; break;
      default: ++stats_.l1_miss_mem; break;
    }
    if (r.l1_kind == AccessKind::MissForwardNoFill) ++stats_.tagmiss_forward_nofill;
  }

  void note_first(RequestId id) {
    if (barrier_ && !first_) first_ = id;
  }

  void step(const TraceEvent& ev) {
    switch (ev.op) {
      case TraceOp::Comment: return;
      case TraceOp::DomainSwitch: current_ = *ev.domain; return;
      case TraceOp::Load: {
        const RequestId id = engine_.issue_load(ev.addr, domain_of(ev));
        note_first(id);
        tally(id);
        break;
      }
      case TraceOp::Store: {
        const RequestId id = engine_.issue_store(ev.addr, domain_of(ev), {ev.value});
        note_first(id);
        break;
      }
      case TraceOp::SpecBegin:
        barrier_ = engine_.issue_barrier();
        first_.reset();
        return;
      case TraceOp::SpecEnd:
        if (ev.squash && first_) engine_.squash_from(*first_);
        engine_.resolve(*barrier_);
        engine_.commit_all();
        barrier_.reset();
        first_.reset();
        return;
    }
    if (!barrier_) engine_.commit_all();
  }

  Hierarchy h_;
  SpecEngine engine_;
  ReplayStats stats_;
  DomainId current_{0};
  std::optional<RequestId> barrier_;
  std::optional<RequestId> first_;
};

}  // namespace

ReplayStats replay(const std::vector<TraceEvent>& events, const ReplayConfig& config) {
  Replayer r(config);
  r.run(events);
  return r.stats();
}

void write_stats_csv(std::ostream& os, const ConfigEcho& echo, const std::vector<std::string>& label_names,
                     const std::vector<std::pair<std::vector<std::string>, ReplayStats>>& rows) {
  write_echo(os, echo);
  bool first = true;
  for (const auto& name : label_names) {
    os << (first ? "" : ",") << name;
    first = false;
  }
  for (const auto& [name, value] : ReplayStats{}.fields()) {
    os << (first ? "" : ",") << name;
    first = false;
  }
  os << '\n';
  for (const auto& [labels, stats] : rows) {
    first = true;
    for (const auto& l : labels) {
      os << (first ? "" : ",") << l;
      first = false;
    }
    for (const auto& [name, value] : stats.fields()) {
      os << (first ? "" : ",") << value;
      first = false;
    }
    os << '\n';
  }
}

void write_stats_table(std::ostream& os, const ReplayStats& stats) {
  for (const auto& [name, value] : stats.fields()) {
    os << std::left << std::setw(30) << name << value << '\n';
  }
}

}  // namespace starsim
