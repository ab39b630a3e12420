#include "starsim/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "starsim/spec_engine.hpp"
#include "starsim/stats.hpp"

namespace starsim {

namespace {

// Stream ids for Rng::fork.
constexpr std::uint64_t kInputStream = 1;
constexpr std::uint64_t kTimerStream = 2;
constexpr std::uint64_t kHierarchyStream = 3;
constexpr std::uint64_t kSecretStreamBase = 0x100;

/// Attacker's clock: exact simulated cycles plus optional Gaussian jitter.
class Timer {
 public:
  Timer(double sigma, Rng rng) : sigma_(sigma), rng_(rng) {}

  double measure(std::uint32_t cycles) {
    if (sigma_ <= 0.0) return cycles;
    return cycles + dist_(rng_) * sigma_;
  }

 private:
  double sigma_;
  Rng rng_;
  std::normal_distribution<double> dist_{0.0, 1.0};
};

double timed_load(Hierarchy& h, Timer& timer, Address addr, DomainId domain) {
  return timer.measure(h.access(MemoryRequest::load(addr, domain)).latency_cycles);
}

HierarchyConfig seeded(const HierarchyConfig& base, std::uint64_t seed) {
  HierarchyConfig c = base;
  c.seed = seed;
  return c;
}

double capped(double z) { return std::min(z, kConfidenceCap); }

std::size_t argmin(std::span<const double> v) {
  return static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
}

std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

/// Groups prime-array positions by the set their line maps to.
struct PrimeArray {
  PrimeArray(const HierarchyConfig& hc, std::uint64_t base) {
    const CacheGeometry& g = hc.geometry;
    sets = g.l1.sets();
    lines.reserve(g.l1.lines);
    group.reserve(g.l1.lines);
    for (std::uint32_t p = 0; p < g.l1.lines; ++p) {
      const Address a = Address::make(base + std::uint64_t{p} * g.line_size_bytes);
      lines.push_back(a);
      group.push_back(set_of(a, g));
    }
    positional = hc.model != ModelKind::SaLru;
  }

  std::uint32_t set_of(Address a, const CacheGeometry& g) const {
    return static_cast<std::uint32_t>((a.value() / g.line_size_bytes) % sets);
  }

  std::size_t columns() const { return positional ? lines.size() : sets; }

  void prime(Hierarchy& h, DomainId d) const {
    for (const Address& a : lines) h.access(MemoryRequest::load(a, d));
  }

  /// Probes in reverse prime order so an LRU set reports a single miss per
  /// foreign line. Fills per-position latencies and per-set sums.
  void probe(Hierarchy& h, Timer& timer, DomainId d, std::vector<double>& positions,
             std::vector<double>& sums) const {
    positions.assign(lines.size(), 0.0);
    sums.assign(sets, 0.0);
    for (std::size_t i = lines.size(); i-- > 0;) {
      positions[i] = timed_load(h, timer, lines[i], d);
      sums[group[i]] += positions[i];
    }
  }

  std::uint32_t sets = 0;
  bool positional = false;
  std::vector<Address> lines;
  std::vector<std::uint32_t> group;
};

void warm_tables(Hierarchy& h, const AttackLayout& layout) {
  const std::uint32_t ls = h.geometry().line_size_bytes;
  const std::uint32_t table_lines = kAesTableEntries * kAesEntryBytes / ls;
  for (unsigned t = 0; t < kAesTables; ++t) {
    for (std::uint32_t b = 0; b < table_lines; ++b) {
      h.access(MemoryRequest::load(layout.aes.table_base(t).plus(std::uint64_t{b} * ls), kVictimDomain));
    }
  }
}

void run_victim(Hierarchy& h, const AesBlock& key, const AesBlock& input, const AttackLayout& layout) {
  for (const AesAccess& a : aes_first_round_accesses(key, input, layout.aes, h.geometry().line_size_bytes)) {
    h.access(MemoryRequest::load(a.addr, kVictimDomain));
  }
}

/// Per key byte, one accumulator per high-nibble hypothesis.
using Hypotheses = std::array<std::array<RunningStats, 16>, 16>;

void decide_nibbles(const Hypotheses& hyp, bool want_low, double threshold, AesAttackResult& result) {
  for (unsigned j = 0; j < 16; ++j) {
    std::array<Candidate, 16> c{};
    for (unsigned h = 0; h < 16; ++h) c[h] = candidate_of(hyp[j][h]);
    const Contrast k = contrast(c, want_low);
    NibbleRecovery& r = result.recovery[j];
    r.best = static_cast<unsigned>(k.best);
    r.confidence = capped(k.z);
    if (k.z >= threshold) r.nibble = static_cast<std::uint8_t>(k.best);
  }
}

AesBlock random_block(Rng& rng) {
  AesBlock b{};
  for (auto& x : b) x = static_cast<std::uint8_t>(rng.next() & 0xFF);
  return b;
}

struct SpectreRig {
  SpectreRig(const AttackConfig& config, const AttackLayout& layout, std::uint8_t secret, bool same_domain)
      : layout(layout),
        hierarchy(seeded(config.hierarchy, Rng(config.seed).fork(kSecretStreamBase + secret).fork(kHierarchyStream).next())),
        engine(hierarchy),
        timer(config.noise_sigma, Rng(config.seed).fork(kSecretStreamBase + secret).fork(kTimerStream)),
        sender(same_domain ? kAttackerDomain : kVictimDomain) {
    std::array<std::uint8_t, 64> line{};
    line[0] = 16;  // array1_size
    for (std::uint8_t i = 0; i < 16; ++i) line[layout.array1_offset + i] = static_cast<std::uint8_t>(i + 1);
    line[layout.secret_offset] = secret;
    hierarchy.memory().write_bytes(Address::make(layout.spectre_line), line);
  }

  Address shared_block(std::uint32_t b) const {
    return Address::make(layout.shared_base + std::uint64_t{b} * layout.shared_stride);
  }

  /// The bounds-checked gadget: `if (x < array1_size) y = array1[x]; shared[y * 64];`
  /// With `mispredict` the branch is predicted taken for out-of-bounds x and
  /// the wrong path is squashed; otherwise x is in bounds and commits.
  void gadget(std::uint64_t x, bool mispredict, bool enter) {
    const Address line = Address::make(layout.spectre_line);
    engine.issue_load(line, sender);
    const RequestId branch = engine.issue_barrier();
    if (enter) {
      const Address a = line.plus(layout.array1_offset + x);
      const RequestId first = engine.issue_load(a, sender);
      const std::uint8_t y = engine.find(first)->response->data.bytes[a.value() - line.value()];
      engine.issue_load(shared_block(y), sender);
      if (mispredict) engine.squash_from(first);
    }
    engine.resolve(branch);
    engine.commit_all();
  }

  const AttackLayout& layout;
  Hierarchy hierarchy;
  SpecEngine engine;
  Timer timer;
  DomainId sender;
  DomainId receiver = kAttackerDomain;
};

std::vector<std::uint32_t> labels_of(std::span<const std::uint8_t> secrets) {
  return {secrets.begin(), secrets.end()};
}

}  // namespace

std::size_t AesAttackResult::recovered_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(recovery.begin(), recovery.end(), [](const NibbleRecovery& r) { return r.nibble.has_value(); }));
}

std::size_t SpectreAttackResult::correct() const noexcept {
  return static_cast<std::size_t>(std::count_if(per_secret.begin(), per_secret.end(), [](const SecretRecovery& r) {
    return r.recovered && *r.recovered == r.secret;
  }));
}

std::size_t SpectreAttackResult::none() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(per_secret.begin(), per_secret.end(), [](const SecretRecovery& r) { return !r.recovered; }));
}

std::size_t prime_probe_columns(const HierarchyConfig& hierarchy) {
  return hierarchy.model == ModelKind::SaLru ? hierarchy.geometry.l1.sets() : hierarchy.geometry.l1.lines;
}

AesAttackResult run_flush_reload_aes(const AesBlock& key, const AttackConfig& config, const AttackLayout& layout) {
  const Rng root(config.seed);
  Hierarchy h(seeded(config.hierarchy, root.fork(kHierarchyStream).next()));
  Rng inputs = root.fork(kInputStream);
  Timer timer(config.noise_sigma, root.fork(kTimerStream));
  const std::uint32_t ls = h.geometry().line_size_bytes;
  const std::uint32_t blocks = layout.fr_blocks_per_table;

  std::vector<Address> monitored;
  for (unsigned t = 0; t < kAesTables; ++t) {
    for (std::uint32_t b = 0; b < blocks; ++b) monitored.push_back(layout.aes.table_base(t).plus(std::uint64_t{b} * ls));
  }

  AesAttackResult result;
  result.matrix = ObservationMatrix::dense(256, blocks);
  Hypotheses hyp{};
  std::vector<double> lat(monitored.size());
  warm_tables(h, layout);

  for (std::uint64_t trial = 0; trial < config.trials; ++trial) {
    const AesBlock input = random_block(inputs);
    for (const Address& a : monitored) h.flush(a, kAttackerDomain);
    run_victim(h, key, input, layout);
    for (std::size_t i = 0; i < monitored.size(); ++i) lat[i] = timed_load(h, timer, monitored[i], kAttackerDomain);

    for (std::uint32_t b = 0; b < blocks; ++b) result.matrix.add(input[0], b, lat[b]);
    result.matrix.record_extreme(input[0], argmin(std::span<const double>(lat).first(blocks)));
    for (unsigned j = 0; j < 16; ++j) {
      const std::size_t region = std::size_t{aes_table_of(j)} * blocks;
      for (unsigned g = 0; g < 16; ++g) hyp[j][g].add(lat[region + ((input[j] >> 4) ^ g)]);
    }
  }
  decide_nibbles(hyp, /*want_low=*/true, config.threshold, result);
  return result;
}

AesAttackResult run_prime_probe_aes(const AesBlock& key, const AttackConfig& config, const AttackLayout& layout) {
  const Rng root(config.seed);
  Hierarchy h(seeded(config.hierarchy, root.fork(kHierarchyStream).next()));
  Rng inputs = root.fork(kInputStream);
  Timer timer(config.noise_sigma, root.fork(kTimerStream));
  const CacheGeometry& g = h.geometry();
  const PrimeArray prime(config.hierarchy, layout.prime_base);

  // Set of each table line, indexed [table][line within table].
  const std::uint32_t table_lines = kAesTableEntries * kAesEntryBytes / g.line_size_bytes;
  std::vector<std::vector<std::uint32_t>> table_set(kAesTables);
  for (unsigned t = 0; t < kAesTables; ++t) {
    for (std::uint32_t b = 0; b < table_lines; ++b) {
      table_set[t].push_back(prime.set_of(layout.aes.table_base(t).plus(std::uint64_t{b} * g.line_size_bytes), g));
    }
  }

  AesAttackResult result;
  result.matrix = ObservationMatrix::dense(256, prime.columns());
  Hypotheses hyp{};
  std::vector<double> positions;
  std::vector<double> sums;
  warm_tables(h, layout);

  for (std::uint64_t trial = 0; trial < config.trials; ++trial) {
    const AesBlock input = random_block(inputs);
    prime.prime(h, kAttackerDomain);
    run_victim(h, key, input, layout);
    prime.probe(h, timer, kAttackerDomain, positions, sums);

    const std::vector<double>& cols = prime.positional ? positions : sums;
    for (std::size_t c = 0; c < cols.size(); ++c) result.matrix.add(input[0], c, cols[c]);
    result.matrix.record_extreme(input[0], argmax(cols));
    for (unsigned j = 0; j < 16; ++j) {
      const auto& sets = table_set[aes_table_of(j)];
      for (unsigned n = 0; n < 16; ++n) hyp[j][n].add(sums[sets[(input[j] >> 4) ^ n]]);
    }
  }
  decide_nibbles(hyp, /*want_low=*/false, config.threshold, result);
  return result;
}

SpectreAttackResult run_spectre_fr(std::span<const std::uint8_t> secrets, const AttackConfig& config,
                                   SpectreOptions options, const AttackLayout& layout) {
  SpectreAttackResult result;
  result.matrix = ObservationMatrix(labels_of(secrets), layout.shared_blocks);
  std::vector<double> lat(layout.shared_blocks);

  for (std::size_t row = 0; row < secrets.size(); ++row) {
    const std::uint8_t secret = secrets[row];
    SpectreRig rig(config, layout, secret, options.same_domain);
    std::vector<RunningStats> blocks(layout.shared_blocks);
    const std::uint64_t out_of_bounds_x = layout.secret_offset - layout.array1_offset;

    for (std::uint64_t trial = 0; trial < config.trials; ++trial) {
      for (std::uint32_t b = 0; b < layout.shared_blocks; ++b) rig.hierarchy.flush(rig.shared_block(b), rig.receiver);
      rig.gadget(out_of_bounds_x, /*mispredict=*/true, options.enter_wrong_path);
      for (std::uint32_t b = 0; b < layout.shared_blocks; ++b) {
        lat[b] = timed_load(rig.hierarchy, rig.timer, rig.shared_block(b), rig.receiver);
        result.matrix.add(row, b, lat[b]);
        blocks[b].add(lat[b]);
      }
      result.matrix.record_extreme(row, argmin(lat));
    }

    std::vector<Candidate> c;
    for (const auto& s : blocks) c.push_back(candidate_of(s));
    const Contrast k = contrast(c, /*want_low=*/true);
    SecretRecovery r{secret, std::nullopt, capped(k.z), static_cast<unsigned>(k.best)};
    if (k.z >= config.threshold) r.recovered = static_cast<std::uint8_t>(k.best);
    result.per_secret.push_back(r);
  }
  return result;
}

SpectreAttackResult run_spectre_pp(std::span<const std::uint8_t> secrets, const AttackConfig& config,
                                   SpectreOptions options, const AttackLayout& layout) {
  const PrimeArray prime(config.hierarchy, layout.prime_base);
  SpectreAttackResult result;
  result.matrix = ObservationMatrix(labels_of(secrets), prime.columns());
  std::vector<double> positions;
  std::vector<double> sums;
  // Per-trial set sums of every secret run, and the baseline pooled over all
  // runs, for the per-trial extremes.
  std::vector<std::vector<std::vector<double>>> attack_sums(secrets.size());
  std::vector<RunningStats> pooled(prime.sets);

  for (std::size_t row = 0; row < secrets.size(); ++row) {
    const std::uint8_t secret = secrets[row];
    SpectreRig rig(config, layout, secret, options.same_domain);
    std::vector<RunningStats> attack(prime.sets);
    std::vector<RunningStats> baseline(prime.sets);
    const std::uint64_t out_of_bounds_x = layout.secret_offset - layout.array1_offset;

    for (std::uint64_t trial = 0; trial < config.trials; ++trial) {
      // Secret-independent reference: the same gadget on its in-bounds path.
      prime.prime(rig.hierarchy, rig.receiver);
      rig.gadget(trial % 16, /*mispredict=*/false, /*enter=*/true);
      prime.probe(rig.hierarchy, rig.timer, rig.receiver, positions, sums);
      for (std::uint32_t s = 0; s < prime.sets; ++s) {
        baseline[s].add(sums[s]);
        pooled[s].add(sums[s]);
      }

      prime.prime(rig.hierarchy, rig.receiver);
      rig.gadget(out_of_bounds_x, /*mispredict=*/true, options.enter_wrong_path);
      prime.probe(rig.hierarchy, rig.timer, rig.receiver, positions, sums);
      const std::vector<double>& cols = prime.positional ? positions : sums;
      for (std::size_t c = 0; c < cols.size(); ++c) result.matrix.add(row, c, cols[c]);
      for (std::uint32_t s = 0; s < prime.sets; ++s) attack[s].add(sums[s]);
      attack_sums[row].push_back(sums);
    }

    std::vector<Candidate> diff(prime.sets);
    for (std::uint32_t s = 0; s < prime.sets; ++s) {
      diff[s].mean = attack[s].mean() - baseline[s].mean();
      diff[s].std_error = std::hypot(attack[s].std_error(), baseline[s].std_error());
    }
    const Contrast k = contrast(diff, /*want_low=*/false);
    SecretRecovery r{secret, std::nullopt, capped(k.z), static_cast<unsigned>(k.best)};
    if (k.z >= config.threshold) r.recovered = static_cast<std::uint8_t>(k.best);
    result.per_secret.push_back(r);
  }

  std::vector<double> d(prime.sets);
  for (std::size_t row = 0; row < secrets.size(); ++row) {
    for (const auto& trial_sums : attack_sums[row]) {
      for (std::uint32_t s = 0; s < prime.sets; ++s) d[s] = trial_sums[s] - pooled[s].mean();
      // Reported in set units; set s is column s of a positional matrix too.
      result.matrix.record_extreme(row, argmax(d));
    }
  }
  return result;
}

}  // namespace starsim
