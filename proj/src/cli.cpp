#include "starsim/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "starsim/attacks.hpp"
#include "starsim/leakage.hpp"
#include "starsim/replay.hpp"
#include "starsim/run_config.hpp"
#include "starsim/selftest.hpp"
#include "starsim/synth.hpp"

namespace starsim {

namespace {

using nlohmann::json;

constexpr std::uint64_t kDefaultAesTrials = std::uint64_t{1} << 15;
constexpr std::uint64_t kDefaultSpectreTrials = 16;

struct AttackArgs {
  std::string kind;
  std::string key_hex = std::string(32, '0');
  unsigned secret = 30;
  bool all_secrets = false;
  bool cross_domain = false;
  bool no_wrong_path = false;
};

struct ReplayArgs {
  std::string trace;
  std::string synth;
  SynthParams params;
  std::string sweep_k;
  bool check_invariants = false;
};

struct SelftestArgs {
  std::string fault = "none";
};

AesBlock parse_key(const std::string& hex) {
  if (hex.size() != 32) throw ConfigError("--key needs 32 hex digits");
  AesBlock key{};
  for (std::size_t i = 0; i < 16; ++i) {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(hex.substr(2 * i, 2), &used, 16);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != 2) throw ConfigError("--key contains a non-hex digit");
    key[i] = static_cast<std::uint8_t>(v);
  }
  return key;
}

std::vector<unsigned> parse_k_list(const std::string& s) {
  std::vector<unsigned> ks;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const unsigned long v = std::stoul(item, &used);
      if (used != item.size() || v > kMaxExtraIndexBits) throw ConfigError("");
      ks.push_back(static_cast<unsigned>(v));
    } catch (const std::exception&) {
      throw ConfigError("--sweep-k expects comma-separated values in 0..16, got '" + s + "'");
    }
  }
  if (ks.empty()) throw ConfigError("--sweep-k is empty");
  return ks;
}

json echo_json(const ConfigEcho& echo) {
  json j = json::object();
  for (const auto& [k, v] : echo) j[k] = v;
  return j;
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << contents;
}

std::string nibble_text(const NibbleRecovery& r) {
  if (!r.nibble) return "NONE";
  static const char* digits = "0123456789abcdef";
  return std::string("0x") + digits[*r.nibble];
}

json leakage_json(const ObservationMatrix& m) {
  if (m.total_trials() < kMinLeakageSamples) return nullptr;
  const LeakageScore s = leakage_score(m);
  return {{"bits", s.bits}, {"noise_floor", s.noise_floor}, {"samples", s.samples}, {"above_floor", s.above_floor()}};
}

int cmd_attack(const RunConfig& rc, const AttackArgs& a, std::ostream& out) {
  const bool aes = a.kind == "fr-aes" || a.kind == "pp-aes";
  AttackConfig ac;
  ac.hierarchy = rc.hierarchy();
  ac.trials = rc.trials.value_or(aes ? kDefaultAesTrials : kDefaultSpectreTrials);
  if (ac.trials == 0) throw ConfigError("--trials must be positive");
  ac.seed = rc.seed;
  ac.noise_sigma = rc.noise_sigma;
  ac.threshold = rc.threshold;

  ConfigEcho echo = rc.echo();
  echo.emplace_back("command", "attack " + a.kind);
  echo.emplace_back("trials", std::to_string(ac.trials));

  ObservationMatrix matrix;
  json summary;
  std::ostringstream text;
  if (aes) {
    const AesBlock key = parse_key(a.key_hex);
    echo.emplace_back("key", a.key_hex);
    const AesAttackResult r = a.kind == "fr-aes" ? run_flush_reload_aes(key, ac) : run_prime_probe_aes(key, ac);
    json recovered = json::array();
    json confidence = json::array();
    std::string line;
    for (const NibbleRecovery& n : r.recovery) {
      recovered.push_back(n.nibble ? json(*n.nibble) : json(nullptr));
      confidence.push_back(n.confidence);
      line += (line.empty() ? "" : ",") + nibble_text(n);
    }
    summary["recovered_high_nibbles"] = recovered;
    summary["confidence"] = confidence;
    summary["recovered_count"] = r.recovered_count();
    text << "recovered=" << line << '\n';
    matrix = r.matrix;
  } else {
    std::vector<std::uint8_t> secrets;
    if (a.all_secrets) {
      for (unsigned s = 0; s < 256; ++s) secrets.push_back(static_cast<std::uint8_t>(s));
      echo.emplace_back("secrets", "0-255");
    } else {
      if (a.secret > 255) throw ConfigError("--secret must be within 0..255");
      secrets.push_back(static_cast<std::uint8_t>(a.secret));
      echo.emplace_back("secrets", std::to_string(a.secret));
    }
    SpectreOptions opt;
    opt.same_domain = !a.cross_domain;
    opt.enter_wrong_path = !a.no_wrong_path;
    echo.emplace_back("same_domain", opt.same_domain ? "true" : "false");
    echo.emplace_back("enter_wrong_path", opt.enter_wrong_path ? "true" : "false");
    const SpectreAttackResult r =
        a.kind == "fr-spectre" ? run_spectre_fr(secrets, ac, opt) : run_spectre_pp(secrets, ac, opt);
    json recovered = json::array();
    json confidence = json::array();
    for (const SecretRecovery& s : r.per_secret) {
      recovered.push_back(s.recovered ? json(*s.recovered) : json(nullptr));
      confidence.push_back(s.confidence);
    }
    summary["secrets"] = secrets;
    summary["recovered"] = recovered;
    summary["confidence"] = confidence;
    summary["correct"] = r.correct();
    summary["none"] = r.none();
    if (r.per_secret.size() == 1) {
      const auto& s = r.per_secret.front();
      text << "recovered=" << (s.recovered ? std::to_string(*s.recovered) : "NONE") << '\n';
    } else {
      text << "correct=" << r.correct() << '/' << r.per_secret.size() << " none=" << r.none() << '\n';
    }
    matrix = r.matrix;
  }
  summary["command"] = "attack";
  summary["attack"] = a.kind;
  summary["config"] = echo_json(echo);
  summary["leakage"] = leakage_json(matrix);
  if (summary["leakage"].is_object()) {
    text << "leakage_bits=" << format_number(summary["leakage"]["bits"].get<double>())
         << " noise_floor=" << format_number(summary["leakage"]["noise_floor"].get<double>()) << '\n';
  }

  out << text.str();
  if (!rc.out.empty()) {
    std::ostringstream csv;
    matrix.write_csv(csv, echo);
    write_file(rc.out + ".csv", csv.str());
    write_file(rc.out + ".json", summary.dump(2) + "\n");
  }
  return kExitOk;
}

std::vector<TraceEvent> load_events(const ReplayArgs& a, const RunConfig& rc, ConfigEcho& echo) {
  if (!a.trace.empty() && !a.synth.empty()) throw ConfigError("give either a trace file or --synth, not both");
  if (!a.trace.empty()) {
    echo.emplace_back("trace", a.trace);
    return read_trace_file(a.trace);
  }
  if (a.synth.empty()) throw ConfigError("replay needs a trace file or --synth PROFILE");
  const SynthProfile profile = parse_profile(a.synth);
  echo.emplace_back("synth", a.synth);
  echo.emplace_back("operations", std::to_string(a.params.operations));
  echo.emplace_back("footprint_lines", std::to_string(a.params.footprint_lines));
  echo.emplace_back("p_squash", format_number(a.params.p_squash));
  return synth_trace(profile, a.params, rc.seed);
}

void emit_stats(const RunConfig& rc, const ConfigEcho& echo, const std::vector<std::string>& labels,
                const std::vector<std::pair<std::vector<std::string>, ReplayStats>>& rows, std::ostream& out) {
  std::ostringstream csv;
  write_stats_csv(csv, echo, labels, rows);
  if (rows.size() == 1) {
    write_stats_table(out, rows.front().second);
  } else {
    out << csv.str();
  }
  if (!rc.out.empty()) write_file(rc.out + ".csv", csv.str());
}

int cmd_replay(const RunConfig& rc, const ReplayArgs& a, std::ostream& out) {
  ConfigEcho echo = rc.echo();
  echo.emplace_back("command", "replay");
  const std::vector<TraceEvent> events = load_events(a, rc, echo);

  std::vector<std::pair<std::vector<std::string>, ReplayStats>> rows;
  if (!a.sweep_k.empty()) {
    if (parse_model(rc.model) != ModelKind::StarNews) throw ConfigError("--sweep-k needs --model star-news");
    if (rc.k) throw ConfigError("--sweep-k and --k are mutually exclusive");
    echo[1].second = a.sweep_k;
    for (unsigned k : parse_k_list(a.sweep_k)) {
      RunConfig one = rc;
      one.k = k;
      ReplayConfig cfg{one.hierarchy(), {}};
      cfg.hierarchy.check_invariants = a.check_invariants;
      rows.push_back({{std::to_string(k)}, replay(events, cfg)});
    }
    emit_stats(rc, echo, {"k"}, rows, out);
  } else {
    ReplayConfig cfg{rc.hierarchy(), {}};
    cfg.hierarchy.check_invariants = a.check_invariants;
    rows.push_back({{rc.model}, replay(events, cfg)});
    emit_stats(rc, echo, {"model"}, rows, out);
  }
  return kExitOk;
}

int cmd_sweep(const RunConfig& rc, ReplayArgs a, std::ostream& out) {
  if (a.synth.empty() && a.trace.empty()) a.synth = "spec-mix";
  ConfigEcho echo = rc.echo();
  echo.erase(echo.begin(), echo.begin() + 2);  // model and k vary per row
  echo.emplace_back("command", "sweep");
  const std::vector<TraceEvent> events = load_events(a, rc, echo);

  struct Point {
    std::string label;
    std::string model;
    std::uint32_t l1_cycles;
    std::optional<unsigned> k;
  };
  const std::vector<Point> points = {
      {"SA-LRU", "sa-lru", 1, std::nullopt},          {"STAR-FARR-T1", "star-farr", 1, std::nullopt},
      {"STAR-FARR-T2", "star-farr", 2, std::nullopt}, {"STAR-NEWS-k0", "star-news", 1, 0u},
      {"STAR-NEWS-k2", "star-news", 1, 2u},           {"STAR-NEWS-k4", "star-news", 1, 4u},
      {"STAR-NEWS-k6", "star-news", 1, 6u},
  };
  std::vector<std::pair<std::vector<std::string>, ReplayStats>> rows;
  for (const Point& p : points) {
    RunConfig one = rc;
    one.model = p.model;
    one.k = p.k;
    one.l1_hit_cycles = p.l1_cycles;
    ReplayConfig cfg{one.hierarchy(), {}};
    cfg.hierarchy.check_invariants = a.check_invariants;
    rows.push_back({{p.label, p.model, std::to_string(p.l1_cycles), p.k ? std::to_string(*p.k) : "-"},
                    replay(events, cfg)});
  }
  std::ostringstream csv;
  write_stats_csv(csv, echo, {"config", "model", "l1_hit_cycles", "k"}, rows);
  out << csv.str();
  if (!rc.out.empty()) write_file(rc.out + ".csv", csv.str());
  return kExitOk;
}

int cmd_selftest(const RunConfig& rc, const SelftestArgs& a, std::ostream& out) {
  const FaultInjection fault = parse_fault(a.fault);
  bool all = true;
  out << "# fault = " << to_string(fault) << "\n# seed = " << rc.seed << '\n';
  for (const SelfTestCheck& c : run_selftest(fault, rc.seed)) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.detail << ")\n";
    all = all && c.passed;
  }
  out << (all ? "selftest passed\n" : "selftest FAILED\n");
  return all ? kExitOk : kExitFailure;
}

void add_synth_options(CLI::App* cmd, ReplayArgs& a) {
  cmd->add_option("--synth", a.synth, "Synthetic profile: uniform-random, pointer-chase, conflict-heavy, spec-mix");
  cmd->add_option("--p-squash", a.params.p_squash, "Squash probability of each SPEC window")->capture_default_str();
  cmd->add_option("--ops", a.params.operations, "Memory operations in a synthetic trace")->capture_default_str();
  cmd->add_option("--footprint", a.params.footprint_lines, "Distinct lines of a synthetic trace")
      ->capture_default_str();
  cmd->add_flag("--check-invariants", a.check_invariants, "Verify inclusion after every operation");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Secure L1 cache simulator: side-channel attack harnesses and trace replay", "starsim"};
  app.fallthrough();
  app.require_subcommand(1);

  RunConfig rc;
  std::optional<unsigned> k;
  std::optional<std::uint64_t> trials;
  auto env = [](CLI::Option* o, const char* name) { return o->envname(std::string("STARSIM_") + name); };
  app.set_config("--config", "", "Read `key = value` settings (long option names as keys)");
  env(app.add_option("--model", rc.model, "sa-lru, star-farr or star-news")->capture_default_str(), "MODEL");
  env(app.add_option("--k", k, "STAR-NEWS extra index bits (0..16, default 4)"), "K");
  env(app.add_option("--seed", rc.seed, "Seed for every random choice")->capture_default_str(), "SEED");
  env(app.add_option("--trials", trials, "Trials (AES: encryptions, Spectre: per secret)"), "TRIALS");
  env(app.add_option("--out", rc.out, "Output prefix; writes PREFIX.csv (and PREFIX.json for attacks)"), "OUT");
  env(app.add_option("--l1-cycles", rc.l1_hit_cycles, "L1 hit latency")->capture_default_str(), "L1_CYCLES");
  env(app.add_option("--l1-ways", rc.l1_ways, "Ways per set of the SA-LRU L1 (also the probe grouping)")
          ->capture_default_str(),
      "L1_WAYS");
  env(app.add_option("--l2-cycles", rc.l2_hit_cycles, "L2 hit latency")->capture_default_str(), "L2_CYCLES");
  env(app.add_option("--mem-cycles", rc.memory_cycles, "Memory latency")->capture_default_str(), "MEM_CYCLES");
  env(app.add_option("--noise-sigma", rc.noise_sigma, "Gaussian timer noise (cycles)")->capture_default_str(),
      "NOISE_SIGMA");
  env(app.add_option("--threshold", rc.threshold, "z score needed to report a recovery")->capture_default_str(),
      "THRESHOLD");

  AttackArgs attack;
  CLI::App* attack_cmd = app.add_subcommand("attack", "Run one of the four attack harnesses");
  attack_cmd->add_option("kind", attack.kind, "fr-aes, pp-aes, fr-spectre or pp-spectre")
      ->required()
      ->check(CLI::IsMember({"fr-aes", "pp-aes", "fr-spectre", "pp-spectre"}));
  attack_cmd->add_option("--key", attack.key_hex, "AES key, 32 hex digits")->capture_default_str();
  attack_cmd->add_option("--secret", attack.secret, "Spectre secret byte")->capture_default_str();
  attack_cmd->add_flag("--all-secrets", attack.all_secrets, "Run every secret value 0..255");
  attack_cmd->add_flag("--cross-domain", attack.cross_domain, "Spectre sender and receiver in different domains");
  attack_cmd->add_flag("--no-wrong-path", attack.no_wrong_path, "Branch resolves correctly; nothing is sent");

  ReplayArgs replay_args;
  CLI::App* replay_cmd = app.add_subcommand("replay", "Replay a trace file or a synthetic workload");
  replay_cmd->add_option("trace", replay_args.trace, "Trace file");
  add_synth_options(replay_cmd, replay_args);
  replay_cmd->add_option("--sweep-k", replay_args.sweep_k, "Comma-separated NEWS k values, e.g. 0,2,4,6");

  ReplayArgs sweep_args;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Replay one workload on every model configuration");
  sweep_cmd->add_option("trace", sweep_args.trace, "Trace file (default: --synth spec-mix)");
  add_synth_options(sweep_cmd, sweep_args);

  SelftestArgs selftest;
  CLI::App* selftest_cmd = app.add_subcommand("selftest", "Run the invariant suites");
  selftest_cmd->add_option("--inject-fault", selftest.fault,
                           "none, farr-deterministic-victim or news-fill-on-spec-tagmiss")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  rc.k = k;
  rc.trials = trials;
  try {
    if (sweep_cmd->parsed()) {
      if (rc.k) throw ConfigError("sweep chooses k itself; drop --k");
      RunConfig probe = rc;
      probe.model = "star-news";
      probe.hierarchy();
    } else {
      rc.hierarchy();
    }
    if (attack_cmd->parsed()) return cmd_attack(rc, attack, out);
    if (replay_cmd->parsed()) return cmd_replay(rc, replay_args, out);
    if (sweep_cmd->parsed()) return cmd_sweep(rc, sweep_args, out);
    if (selftest_cmd->parsed()) return cmd_selftest(rc, selftest, out);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const TraceParseError& e) {
    err << "trace error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace starsim
