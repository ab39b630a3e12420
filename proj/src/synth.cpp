#include "starsim/synth.hpp"

#include <numeric>

#include "starsim/rng.hpp"

namespace starsim {

SynthProfile parse_profile(std::string_view name) {
  if (name == "uniform-random") return SynthProfile::UniformRandom;
  if (name == "pointer-chase") return SynthProfile::PointerChase;
  if (name == "conflict-heavy") return SynthProfile::ConflictHeavy;
  if (name == "spec-mix") return SynthProfile::SpecMix;
  throw ConfigError("unknown synthetic profile '" + std::string(name) +
                    "' (expected uniform-random, pointer-chase, conflict-heavy or spec-mix)");
}

std::string_view to_string(SynthProfile p) noexcept {
  switch (p) {
    case SynthProfile::UniformRandom: return "uniform-random";
    case SynthProfile::PointerChase: return "pointer-chase";
    case SynthProfile::ConflictHeavy: return "conflict-heavy";
    case SynthProfile::SpecMix: return "spec-mix";
  }
  return "?";
}

namespace {

class Emitter {
 public:
  Emitter(const SynthParams& p, Rng& rng) : p_(p), rng_(rng) {}

  void memory_op(std::uint64_t line, bool allow_store) {
    TraceEvent ev;
    ev.addr = Address::make(p_.base + line * p_.line_size + rng_.choose(p_.line_size));
    ev.domain = DomainId(p_.domain);
    if (allow_store && rng_.bernoulli(p_.store_fraction)) {
      ev.op = TraceOp::Store;
      ev.value = static_cast<std::uint8_t>(rng_.next() & 0xFF);
    } else {
      ev.op = TraceOp::Load;
    }
    out.push_back(ev);
    ++emitted;
  }

  void marker(TraceOp op, bool squash = false) {
    TraceEvent ev;
    ev.op = op;
    ev.squash = squash;
    out.push_back(ev);
  }

  std::vector<TraceEvent> out;
  std::uint64_t emitted = 0;

 private:
  const SynthParams& p_;
  Rng& rng_;
};

}  // namespace

std::vector<TraceEvent> synth_trace(SynthProfile profile, const SynthParams& params, std::uint64_t seed) {
  if (params.footprint_lines == 0) throw ConfigError("synthetic footprint must be at least one line");
  if (params.p_squash < 0.0 || params.p_squash > 1.0) throw ConfigError("p_squash must be within [0, 1]");
  if (params.window_loads == 0) throw ConfigError("SPEC windows need at least one load");
  Rng rng(seed);
  Emitter e(params, rng);

  switch (profile) {
    case SynthProfile::UniformRandom:
      while (e.emitted < params.operations) e.memory_op(rng.choose(params.footprint_lines), true);
      break;

    case SynthProfile::PointerChase: {
      std::vector<std::uint32_t> order(params.footprint_lines);
      std::iota(order.begin(), order.end(), 0u);
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.choose(i)]);
      std::size_t at = 0;
      while (e.emitted < params.operations) {
        e.memory_op(order[at], false);
        at = (at + 1) % order.size();
      }
      break;
    }

    case SynthProfile::ConflictHeavy:
    case SynthProfile::SpecMix: {
      const bool conflict = profile == SynthProfile::ConflictHeavy;
      auto pick = [&]() -> std::uint64_t {
        if (!conflict) return rng.choose(params.footprint_lines);
        return rng.choose(16) + (rng.choose(1024) << 9);
      };
      while (e.emitted < params.operations) {
        for (std::uint32_t i = 0; i < params.gap_operations; ++i) e.memory_op(pick(), true);
        e.marker(TraceOp::SpecBegin);
        for (std::uint32_t i = 0; i < params.window_loads; ++i) e.memory_op(pick(), false);
        e.marker(TraceOp::SpecEnd, rng.bernoulli(params.p_squash));
      }
      break;
    }
  }
  return std::move(e.out);
}

}  // namespace starsim
