#include <gtest/gtest.h>

#include "starsim/synth.hpp"
#include "starsim/trace.hpp"

using namespace starsim;

TEST(Trace, ParsesLoadWithDomain) {
  const auto ev = parse_trace("L 0x1040 1");
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0].op, TraceOp::Load);
  EXPECT_EQ(ev[0].addr.value(), 0x1040u);
  ASSERT_TRUE(ev[0].domain);
  EXPECT_EQ(ev[0].domain->value(), 1);
  EXPECT_EQ(ev[0].line, 1u);
}

TEST(Trace, ParsesWindowAndStore) {
  const auto ev = parse_trace(
      "# warm\n"
      "\n"
      "DOMAIN_SWITCH 3\n"
      "S 2000 3 0xff\n"
      "SPEC_BEGIN\n"
      "L 0x40\n"
      "SPEC_END squash\n");
  ASSERT_EQ(ev.size(), 6u);
  EXPECT_EQ(ev[0].op, TraceOp::Comment);
  EXPECT_EQ(ev[0].comment, "warm");
  EXPECT_EQ(ev[1].op, TraceOp::DomainSwitch);
  EXPECT_EQ(ev[2].op, TraceOp::Store);
  EXPECT_EQ(ev[2].addr.value(), 0x2000u);
  EXPECT_EQ(ev[2].value, 0xFF);
  EXPECT_EQ(ev[3].op, TraceOp::SpecBegin);
  EXPECT_FALSE(ev[4].domain);
  EXPECT_EQ(ev[4].line, 6u);
  EXPECT_EQ(ev[5].op, TraceOp::SpecEnd);
  EXPECT_TRUE(ev[5].squash);
}

TEST(Trace, ErrorsCiteTheLine) {
  auto line_of_error = [](const char* text) -> std::size_t {
    try {
      parse_trace(text);
    } catch (const TraceParseError& e) {
      return e.line();
    }
    return 0;
  };
  EXPECT_EQ(line_of_error("L 0x40\nL 0x1000000000000\n"), 2u);  // 2^48
  EXPECT_EQ(line_of_error("L 0xfffffffffffff\n"), 1u);
  EXPECT_EQ(line_of_error("L zz\n"), 1u);
  EXPECT_EQ(line_of_error("X 0x40\n"), 1u);
  EXPECT_EQ(line_of_error("L 0x40 256\n"), 1u);  // 8-bit domains
  EXPECT_EQ(line_of_error("L\n"), 1u);
  EXPECT_EQ(line_of_error("S 0x40 1 300\n"), 1u);
  EXPECT_EQ(line_of_error("SPEC_BEGIN\nSPEC_BEGIN\n"), 2u);
  EXPECT_EQ(line_of_error("L 40\nSPEC_END commit\n"), 2u);
  EXPECT_EQ(line_of_error("SPEC_BEGIN\nSPEC_END maybe\n"), 2u);
  EXPECT_EQ(line_of_error("L 40\nSPEC_BEGIN\nL 80\n"), 2u);
  EXPECT_EQ(line_of_error("L 0xffffffffffff\n"), 0u);  // 2^48 - 1 is fine
}

TEST(Trace, WiderDomainFieldAcceptsLargerIds) {
  EXPECT_THROW(parse_trace("L 40 300"), TraceParseError);
  EXPECT_NO_THROW(parse_trace("L 40 300", 16));
}

TEST(Trace, FormatRoundTrips) {
  const char* text =
      "# header\n"
      "DOMAIN_SWITCH 2\n"
      "L 0x1040 1\n"
      "S 0x2000 3 255\n"
      "S 0x2040\n"
      "SPEC_BEGIN\n"
      "L 0x40\n"
      "SPEC_END commit\n"
      "SPEC_BEGIN\n"
      "SPEC_END squash\n";
  const auto ev = parse_trace(text);
  EXPECT_EQ(format_trace(ev), text);
}

TEST(Trace, SyntheticTracesRoundTrip) {
  for (auto p : {SynthProfile::UniformRandom, SynthProfile::PointerChase, SynthProfile::ConflictHeavy,
                 SynthProfile::SpecMix}) {
    SynthParams params;
    params.operations = 2000;
    const auto ev = synth_trace(p, params, 3);
    const auto again = parse_trace(format_trace(ev));
    ASSERT_EQ(again.size(), ev.size());
    for (std::size_t i = 0; i < ev.size(); ++i) {
      ASSERT_EQ(again[i].op, ev[i].op);
      ASSERT_EQ(again[i].addr, ev[i].addr);
      ASSERT_EQ(again[i].value, ev[i].value);
      ASSERT_EQ(again[i].squash, ev[i].squash);
    }
  }
}

TEST(Synth, SameSeedSameTrace) {
  SynthParams params;
  params.operations = 5000;
  EXPECT_EQ(format_trace(synth_trace(SynthProfile::SpecMix, params, 4)),
            format_trace(synth_trace(SynthProfile::SpecMix, params, 4)));
  EXPECT_NE(format_trace(synth_trace(SynthProfile::SpecMix, params, 4)),
            format_trace(synth_trace(SynthProfile::SpecMix, params, 5)));
}

TEST(Synth, ProfileNames) {
  for (auto p : {SynthProfile::UniformRandom, SynthProfile::PointerChase, SynthProfile::ConflictHeavy,
                 SynthProfile::SpecMix}) {
    EXPECT_EQ(parse_profile(to_string(p)), p);
  }
  EXPECT_THROW(parse_profile("spec"), ConfigError);
}

TEST(Synth, ConflictHeavyCollidesOnLowIndexBits) {
  SynthParams params;
  params.operations = 4000;
  for (const auto& ev : synth_trace(SynthProfile::ConflictHeavy, params, 1)) {
    if (ev.op != TraceOp::Load && ev.op != TraceOp::Store) continue;
    const std::uint64_t line = (ev.addr.value() - params.base) / 64;
    ASSERT_LT(line % 512, 16u);
  }
}

TEST(Synth, RejectsBadParameters) {
  SynthParams params;
  params.p_squash = 1.5;
  EXPECT_THROW(synth_trace(SynthProfile::SpecMix, params, 1), ConfigError);
  params = SynthParams{};
  params.footprint_lines = 0;
  EXPECT_THROW(synth_trace(SynthProfile::UniformRandom, params, 1), ConfigError);
}
