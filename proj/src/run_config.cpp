#include "starsim/run_config.hpp"

namespace starsim {

unsigned RunConfig::effective_k() const {
  const ModelKind m = parse_model(model);
  if (m != ModelKind::StarNews) {
    if (k) throw ConfigError("--k applies only to star-news (model is " + model + ")");
    return 0;
  }
  return k.value_or(kDefaultNewsK);
}

HierarchyConfig RunConfig::hierarchy() const {
  HierarchyConfig c;
  c.model = parse_model(model);
  c.news_k = effective_k();
  if (l1_hit_cycles < 1 || l2_hit_cycles < 1 || memory_cycles < 1) {
    throw ConfigError("latencies must be at least 1 cycle");
  }
  c.geometry.l1.hit_cycles = l1_hit_cycles;
  c.geometry.l1.associativity = l1_ways;
  c.geometry.l2.hit_cycles = l2_hit_cycles;
  c.geometry.memory_latency_cycles = memory_cycles;
  c.seed = seed;
  if (noise_sigma < 0.0) throw ConfigError("noise sigma must be non-negative");
  c.validate();
  return c;
}

ConfigEcho RunConfig::echo() const {
  return {
      {"model", model},
      {"k", parse_model(model) == ModelKind::StarNews ? std::to_string(effective_k()) : "-"},
      {"l1_hit_cycles", std::to_string(l1_hit_cycles)},
      {"l1_ways", std::to_string(l1_ways)},
      {"l2_hit_cycles", std::to_string(l2_hit_cycles)},
      {"memory_cycles", std::to_string(memory_cycles)},
      {"seed", std::to_string(seed)},
      {"noise_sigma", format_number(noise_sigma)},
      {"threshold", format_number(threshold)},
  };
}

}  // namespace starsim
