#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "starsim/cli.hpp"

using namespace starsim;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(std::initializer_list<std::string> args) {
  std::vector<std::string> storage{"starsim"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : storage) argv.push_back(s.c_str());
  std::ostringstream out;
  std::ostringstream err;
  CliRun r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

class CliFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("starsim_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST(Cli, HelpExitsZero) {
  const CliRun r = run({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("attack"), std::string::npos);
}

TEST(Cli, MissingSubcommandIsUsageError) { EXPECT_EQ(run({}).code, kExitUsage); }

TEST(Cli, BadConfigIsUsageError) {
  EXPECT_EQ(run({"--model", "lru", "selftest"}).code, kExitUsage);
  EXPECT_EQ(run({"--model", "sa-lru", "--k", "4", "attack", "fr-spectre"}).code, kExitUsage);
  EXPECT_EQ(run({"--model", "star-news", "--k", "17", "attack", "fr-spectre"}).code, kExitUsage);
  EXPECT_EQ(run({"--l1-cycles", "0", "selftest"}).code, kExitUsage);
  EXPECT_EQ(run({"--mem-cycles", "0", "replay", "--synth", "spec-mix"}).code, kExitUsage);
  EXPECT_EQ(run({"attack", "fr-rsa"}).code, kExitUsage);
  EXPECT_EQ(run({"attack", "fr-aes", "--key", "00"}).code, kExitUsage);
  EXPECT_EQ(run({"attack", "fr-spectre", "--secret", "256"}).code, kExitUsage);
  EXPECT_EQ(run({"--k", "2", "sweep"}).code, kExitUsage);
  EXPECT_EQ(run({"replay"}).code, kExitUsage);
  EXPECT_EQ(run({"replay", "--synth", "bogus"}).code, kExitUsage);
  EXPECT_EQ(run({"--model", "sa-lru", "replay", "--synth", "spec-mix", "--sweep-k", "0,2"}).code, kExitUsage);
}

TEST(Cli, SpectreBaselineRecoversThirty) {
  const CliRun r = run({"--model", "sa-lru", "attack", "fr-spectre", "--secret", "30"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("recovered=30\n"), std::string::npos);
}

TEST(Cli, SpectreOnNewsRecoversNothing) {
  const CliRun r = run({"--model", "star-news", "--k", "4", "attack", "fr-spectre", "--secret", "30"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("recovered=NONE\n"), std::string::npos);
}

TEST(Cli, ZeroKeyFlushReload) {
  const CliRun r = run({"--model", "sa-lru", "--trials", "2048", "attack", "fr-aes", "--key",
                     "00000000000000000000000000000000"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("recovered=0x0,0x0,0x0,0x0,0x0,0x0,0x0,0x0,0x0,0x0,0x0,0x0,0x0,0x0,0x0,0x0\n"),
            std::string::npos);
  EXPECT_NE(r.out.find("leakage_bits="), std::string::npos);
}

TEST(Cli, MissingTraceFileIsRuntimeFailure) {
  EXPECT_EQ(run({"replay", "/nonexistent/trace.trc"}).code, kExitFailure);
}

TEST_F(CliFiles, AttackOutputsAreByteIdenticalAcrossRuns) {
  for (const char* prefix : {"a", "b"}) {
    ASSERT_EQ(run({"--model", "star-farr", "--trials", "64", "--seed", "7", "--out", path(prefix), "attack",
                   "pp-spectre", "--secret", "9"})
                  .code,
              kExitOk);
  }
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  const std::string csv = slurp(path("a.csv"));
  EXPECT_EQ(csv.rfind("# model = star-farr\n", 0), 0u);
  EXPECT_NE(csv.find("# seed = 7\n"), std::string::npos);
  EXPECT_NE(csv.find("row,col,mean_latency,trials\n"), std::string::npos);
  EXPECT_NE(slurp(path("a.json")).find("\"recovered\""), std::string::npos);
}

TEST_F(CliFiles, ReplayOfTraceFileIsDeterministic) {
  {
    std::ofstream t(path("t.trc"));
    t << "# tiny\nL 0x1040 1\nS 0x2000 1 5\nSPEC_BEGIN\nL 0x3000 1\nSPEC_END squash\n";
  }
  for (const char* prefix : {"a", "b"}) {
    ASSERT_EQ(run({"--model", "sa-lru", "--out", path(prefix), "replay", path("t.trc")}).code, kExitOk);
  }
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  EXPECT_NE(slurp(path("a.csv")).find("\nsa-lru,2,1,"), std::string::npos);
}

TEST_F(CliFiles, TraceErrorsExitTwoWithLineNumber) {
  {
    std::ofstream t(path("bad.trc"));
    t << "L 0x40\nL 0x1000000000000\n";
  }
  const CliRun r = run({"replay", path("bad.trc")});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("line 2"), std::string::npos);
}

TEST_F(CliFiles, ConfigFileAndFlagPrecedence) {
  {
    std::ofstream c(path("run.ini"));
    c << "model = star-farr\nseed = 11\nl1-cycles = 2\n";
  }
  ASSERT_EQ(run({"--config", path("run.ini"), "--seed", "12", "--out", path("r"), "replay", "--synth", "spec-mix",
                 "--ops", "2000"})
                .code,
            kExitOk);
  const std::string csv = slurp(path("r.csv"));
  EXPECT_NE(csv.find("# model = star-farr\n"), std::string::npos);
  EXPECT_NE(csv.find("# seed = 12\n"), std::string::npos);
  EXPECT_NE(csv.find("# l1_hit_cycles = 2\n"), std::string::npos);
}

TEST_F(CliFiles, EnvironmentOverridesDefaults) {
  ::setenv("STARSIM_SEED", "99", 1);
  const int code = run({"--out", path("e"), "replay", "--synth", "uniform-random", "--ops", "500"}).code;
  ::unsetenv("STARSIM_SEED");
  ASSERT_EQ(code, kExitOk);
  EXPECT_NE(slurp(path("e.csv")).find("# seed = 99\n"), std::string::npos);
}

TEST_F(CliFiles, SweepKIsMonotoneOnConflictHeavy) {
  ASSERT_EQ(run({"--model", "star-news", "--out", path("k"), "replay", "--synth", "conflict-heavy", "--ops",
                 "20000", "--sweep-k", "0,2,4,6"})
                .code,
            kExitOk);
  std::istringstream in(slurp(path("k.csv")));
  std::string line;
  std::vector<std::string> header;
  std::vector<std::uint64_t> tagmiss;
  std::size_t col = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (header.empty()) {
      header = cells;
      col = static_cast<std::size_t>(std::find(header.begin(), header.end(), "tagmiss_forward_nofill") -
                                     header.begin());
      ASSERT_LT(col, header.size());
      continue;
    }
    tagmiss.push_back(std::stoull(cells[col]));
  }
  ASSERT_EQ(tagmiss.size(), 4u);
  for (std::size_t i = 1; i < tagmiss.size(); ++i) EXPECT_LE(tagmiss[i], tagmiss[i - 1]);
  EXPECT_GT(tagmiss[0], 0u);
}

TEST(Cli, SpecMixOnFarrSendsInvalidations) {
  const CliRun r = run({"--model", "star-farr", "replay", "--synth", "spec-mix", "--p-squash", "0.1", "--ops", "20000"});
  EXPECT_EQ(r.code, kExitOk);
  const auto pos = r.out.find("sfill_inv_sent");
  ASSERT_NE(pos, std::string::npos);
  const std::string rest = r.out.substr(pos + 14);
  EXPECT_GT(std::stoull(rest), 0u);
}

TEST(Cli, SelftestPassesAndFaultsFail) {
  EXPECT_EQ(run({"selftest"}).code, kExitOk);
  const CliRun farr = run({"selftest", "--inject-fault", "farr-deterministic-victim"});
  EXPECT_EQ(farr.code, kExitFailure);
  EXPECT_NE(farr.out.find("FAIL"), std::string::npos);
  EXPECT_EQ(run({"selftest", "--inject-fault", "news-fill-on-spec-tagmiss"}).code, kExitFailure);
  EXPECT_EQ(run({"selftest", "--inject-fault", "bogus"}).code, kExitUsage);
}

TEST(Cli, SweepCoversEveryConfiguration) {
  const CliRun r = run({"sweep", "--ops", "5000"});
  EXPECT_EQ(r.code, kExitOk);
  for (const char* label : {"SA-LRU,", "STAR-FARR-T1,", "STAR-FARR-T2,", "STAR-NEWS-k0,", "STAR-NEWS-k6,"}) {
    EXPECT_NE(r.out.find(std::string("\n") + label), std::string::npos) << label;
  }
}
