#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "rydsim/config.hpp"
#include "rydsim/errors.hpp"
#include "rydsim/sequence.hpp"
#include "rydsim/sequence_engine.hpp"
#include "rydsim/units.hpp"

using namespace rydsim;

namespace {

std::string slurp(const std::string& rel) {
  std::ifstream in(std::string(RYDSIM_SOURCE_DIR) + "/" + rel);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ParseError parse_error(std::string_view src) {
  try {
    parse_program(src);
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "no parse error for: " << src;
  return ParseError("", 0, 0);
}

ExperimentConfig ideal_config() {
  ExperimentConfig c;
  c.pulse_fidelity = 1.0;
  c.pump393_fidelity = 1.0;
  c.pump397_fidelity = 1.0;
  return c;
}

}  // namespace

TEST(Units, Suffixes) {
  EXPECT_EQ(*parse_quantity("1.5ms", Dimension::Time), 0.0015);
  EXPECT_EQ(*parse_quantity("500us", Dimension::Time), 500e-6);
  EXPECT_EQ(*parse_quantity("2.8MHz", Dimension::Frequency), 2.8e6);
  EXPECT_EQ(*parse_quantity("80kHz", Dimension::Frequency), 80e3);
  EXPECT_EQ(*parse_quantity("280mV", Dimension::Voltage), 0.28);
  EXPECT_EQ(*parse_quantity("6.74um", Dimension::Length), 6.74e-6);
  EXPECT_EQ(*parse_quantity("-15MHz", Dimension::Frequency), -15e6);
  EXPECT_EQ(*parse_quantity("42", Dimension::Frequency), 42.0);
  EXPECT_FALSE(parse_quantity("2ms", Dimension::Frequency));
  EXPECT_FALSE(parse_quantity("abc", Dimension::Time));
  EXPECT_FALSE(parse_quantity("", Dimension::Time));
}

TEST(Parser, TwoInstructionProgram) {
  const auto p = parse_program("pulse pi ion=0 from=S:-1/2 to=D5/2:-5/2\ndetect t=2ms");
  ASSERT_EQ(p.instructions.size(), 2u);
  const auto& pi = std::get<PiPulse>(p.instructions[0]);
  EXPECT_EQ(pi.lower.to_string(), "S1/2:-1/2");
  EXPECT_EQ(pi.upper.to_string(), "D5/2:-5/2");
  EXPECT_EQ(std::get<Detect>(p.instructions[1]).t, 0.002);
  EXPECT_EQ(p.source_lines, (std::vector<std::size_t>{1, 2}));
}

TEST(Parser, SelectionRuleErrorCarriesLocation) {
  const auto e = parse_error("pulse pi ion=0 from=S:-1/2 to=D5/2:+5/2\ndetect t=2ms");
  EXPECT_EQ(e.line(), 1u);
  EXPECT_EQ(e.column(), 31u);
  EXPECT_NE(std::string(e.what()).find("|dm| <= 2"), std::string::npos);
}

TEST(Parser, Diagnostics) {
  EXPECT_EQ(parse_error("detect t=1ms\ndetect t=1ms").line(), 2u);
  EXPECT_EQ(parse_error("detect t=1ms\npump 397").line(), 2u);
  EXPECT_EQ(parse_error("pump 397\n").line(), 1u);
  EXPECT_EQ(parse_error("bogus x=1\ndetect t=1ms").column(), 1u);
  EXPECT_EQ(parse_error("vuv t=1ms t=2ms\ndetect t=1ms").column(), 11u);
  EXPECT_EQ(parse_error("vuv t=1ms foo=2\ndetect t=1ms").column(), 11u);
  EXPECT_EQ(parse_error("vuv t=-1ms\ndetect t=1ms").column(), 7u);
  EXPECT_EQ(parse_error("pulse pi ion=0 from=X:1/2 to=D5/2:-5/2\ndetect t=1ms").column(), 21u);
  EXPECT_EQ(parse_error("  pulse pi ion=0 from=S:-1/2 to=D5/2:-9/2\ndetect t=1ms").column(), 33u);
  EXPECT_EQ(parse_error("transport t=1us\ndetect t=1ms").line(), 1u);
  EXPECT_EQ(parse_error("detect t=1ms signal=grey").column(), 21u);
  EXPECT_EQ(parse_error("pump 397\ninit state=S:+1/2\ndetect t=1ms").line(), 2u);
  EXPECT_EQ(parse_error("init state=D5/2:+1/2\ndetect t=1ms").line(), 1u);
}

TEST(Parser, CommentsAndBlankLines) {
  const auto p = parse_program("# header\n\n  pump 397   # trailing\n\ndetect t=1ms\n");
  ASSERT_EQ(p.instructions.size(), 2u);
  EXPECT_EQ(p.source_lines[0], 3u);
}

TEST(Parser, ShippedMChangeScanHasSevenInstructions) {
  const auto p = parse_program(slurp("sequences/mchange_scan.seq"));
  ASSERT_EQ(p.instructions.size(), 7u);
  EXPECT_TRUE(std::holds_alternative<PiPulse>(p.instructions[0]));
  EXPECT_TRUE(std::holds_alternative<Vuv>(p.instructions[1]));
  EXPECT_TRUE(std::holds_alternative<Detect>(p.instructions[6]));
  EXPECT_EQ(p.detect().signal, Signal::Dark);
}

TEST(Parser, NormalizedFormRoundTrips) {
  for (const char* f : {"sequences/mchange_scan.seq", "sequences/mchange_scan_plus.seq",
                        "sequences/addressed_central.seq", "sequences/addressed_outer.seq"}) {
    const auto text = to_string(parse_program(slurp(f)));
    EXPECT_EQ(to_string(parse_program(text)), text) << f;
  }
  const auto rabi = parse_program("pulse rabi ion=2 from=S:+1/2 to=D5/2:-1/2 omega=80kHz t=6.25us\n"
                                  "transport dv=280mV t=500us\ndetect t=1ms vuv=3ms");
  const auto text = to_string(rabi);
  EXPECT_EQ(to_string(parse_program(text)), text);
  EXPECT_NE(text.find("omega=80000"), std::string::npos);
  EXPECT_NE(text.find("dv=0.28"), std::string::npos);
}

TEST(Engine, DetectOnlyAllBright) {
  auto cfg = ExperimentConfig{};
  cfg.n_ions = 3;
  RunOptions o;
  o.shots = 500;
  const auto r = run(parse_program("detect t=1ms"), cfg, o);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(r.bright_fraction(i), 1.0);
}

TEST(Engine, FarDetunedScanHasNoDarkSignal) {
  RunOptions o;
  o.shots = 5000;
  o.vuv_detuning = -200e6;
  const auto r = run(parse_program(slurp("sequences/mchange_scan.seq")), ideal_config(), o);
  EXPECT_EQ(r.signal_probability(0), 0.0);
}

TEST(Engine, ShelvingFidelityAboveNinetyFive) {
  // Far detuned, default fidelities: signal = shelving failures only.
  RunOptions o;
  o.shots = 20000;
  o.vuv_detuning = -200e6;
  const auto r = run(parse_program(slurp("sequences/mchange_scan.seq")), ExperimentConfig{}, o);
  EXPECT_LT(r.signal_probability(0), 0.05);
}

TEST(Engine, BlindChannelGivesZeroSignal) {
  auto cfg = load_config(std::string(RYDSIM_SOURCE_DIR) + "/sequences/blind_channel.json");
  const Experiment exp(parse_program(slurp("sequences/mchange_scan.seq")), cfg);
  const auto scan = exp.scan(std::vector<double>{-10e6, -3.919e6, 0.0, 5e6}, 3000, 1);
  for (const auto& row : scan.p) EXPECT_EQ(row[0], 0.0);
}

TEST(Engine, DeterministicAcrossThreadCounts) {
  auto cfg = ExperimentConfig{};
  cfg.n_ions = 3;
  cfg.vuv_unswitched = true;
  const Experiment exp(parse_program(slurp("sequences/addressed_central.seq")), cfg);
  RunOptions o;
  o.shots = 3000;
  o.seed = 42;
  o.threads = 1;
  const auto a = exp.run(o);
  o.threads = 4;
  const auto b = exp.run(o);
  o.threads = 7;
  const auto c = exp.run(o);
  EXPECT_EQ(a.bright_counts, b.bright_counts);
  EXPECT_EQ(a.bright_counts, c.bright_counts);
  o.seed = 43;
  EXPECT_NE(exp.run(o).bright_counts, a.bright_counts);
}

TEST(Engine, TraceIsDeterministicAndStartsWithShot) {
  const Experiment exp(parse_program(slurp("sequences/mchange_scan.seq")), ExperimentConfig{});
  RunOptions o;
  o.shots = 50;
  o.trace = true;
  o.vuv_detuning = 2.8e6;
  o.threads = 1;
  const auto a = exp.run(o);
  o.threads = 3;
  const auto b = exp.run(o);
  EXPECT_EQ(a.trace, b.trace);
  ASSERT_FALSE(a.trace.empty());
  EXPECT_EQ(a.trace.front(), "shot=0");
  bool excite = false;
  for (const auto& l : a.trace) excite |= l.find("event=excite") != std::string::npos;
  EXPECT_TRUE(excite);
}

TEST(Engine, MirroredProgramMirrorsScan) {
  const Experiment minus(parse_program(slurp("sequences/mchange_scan.seq")), ExperimentConfig{});
  const Experiment plus(parse_program(slurp("sequences/mchange_scan_plus.seq")), ExperimentConfig{});
  const std::vector<double> grid{-6e6, -2.8e6, 0.0, 2.8e6, 6e6};
  std::vector<double> mirrored;
  for (auto it = grid.rbegin(); it != grid.rend(); ++it) mirrored.push_back(-*it);
  const auto a = minus.scan(grid, 20000, 1);
  const auto b = plus.scan(mirrored, 20000, 2);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto kb = grid.size() - 1 - k;
    const double se = std::hypot(a.err[k][0], b.err[kb][0]);
    EXPECT_NEAR(a.p[k][0], b.p[kb][0], 4 * se + 1e-3) << grid[k];
  }
}

TEST(Engine, CentralAddressedIonDominates) {
  auto cfg = load_config(std::string(RYDSIM_SOURCE_DIR) + "/sequences/three_ion.json");
  const Experiment exp(parse_program(slurp("sequences/addressed_central.seq")), cfg);
  RunOptions o;
  o.shots = 20000;
  const auto r = exp.run(o);
  EXPECT_GT(r.signal_probability(1), r.signal_probability(0));
  EXPECT_GT(r.signal_probability(1), r.signal_probability(2));
}

TEST(Engine, OuterSequenceAddressesIonZero) {
  auto cfg = load_config(std::string(RYDSIM_SOURCE_DIR) + "/sequences/three_ion.json");
  const Experiment exp(parse_program(slurp("sequences/addressed_outer.seq")), cfg);
  RunOptions o;
  o.shots = 20000;
  const auto r = exp.run(o);
  EXPECT_GT(r.signal_probability(0), r.signal_probability(1));
  EXPECT_GT(r.signal_probability(0), r.signal_probability(2));
}

TEST(Engine, ProgramConfigMismatch) {
  EXPECT_THROW(Experiment(parse_program("pulse pi ion=2 from=S:-1/2 to=D5/2:-5/2\ndetect t=1ms"),
                          ExperimentConfig{}),
               InputError);
}

TEST(Engine, ScanGridChecks) {
  const Experiment exp(parse_program("detect t=1ms"), ExperimentConfig{});
  EXPECT_THROW(exp.scan({}, 10, 1), InputError);
  EXPECT_THROW(exp.scan({1.0, 1.0}, 10, 1), InputError);
  EXPECT_EQ(exp.scan({5.0}, 10, 1).size(), 1u);
  RunOptions o;
  o.shots = 0;
  EXPECT_THROW(exp.run(o), InputError);
}

TEST(Grid, Linear) {
  const auto g = linear_grid(-15e6, 15e6, 61);
  ASSERT_EQ(g.size(), 61u);
  EXPECT_EQ(g.front(), -15e6);
  EXPECT_EQ(g.back(), 15e6);
  EXPECT_EQ(g[30], 0.0);
}
