#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "cli.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Out {
  int code;
  std::string out;
  std::string err;
};

Out cli(std::vector<std::string> args) {
  args.insert(args.begin(), "rydsim");
  std::ostringstream o, e;
  const int code = rydsim::cli::run(args, o, e);
  return {code, o.str(), e.str()};
}

std::string seq(const std::string& name) {
  return std::string(RYDSIM_SOURCE_DIR) + "/sequences/" + name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path tmp(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "rydsim_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Cli, ParseMChangeScan) {
  const auto r = cli({"parse", seq("mchange_scan.seq")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 7);
}

TEST(Cli, ParseErrorExitsTwo) {
  const auto p = tmp("bad.seq");
  std::ofstream(p) << "pulse pi ion=0 from=S:-1/2 to=D5/2:+5/2\ndetect t=2ms\n";
  const auto r = cli({"parse", p.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 1, column 31"), std::string::npos);
  EXPECT_EQ(cli({"parse", "/nonexistent.seq"}).code, 2);
}

TEST(Cli, UnknownFlagExitsTwo) {
  const auto r = cli({"positions", "--n", "3", "--bogus"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST(Cli, PositionsOneIon) {
  const auto r = cli({"positions", "--n", "1"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "0.0\n");
}

TEST(Cli, PositionsThreeIons) {
  const auto r = cli({"positions", "--n", "3"});
  EXPECT_EQ(r.code, 0);
  std::istringstream in(r.out);
  double a, b, c;
  in >> a >> b >> c;
  EXPECT_NEAR(c - b, 6.74e-6, 0.01e-6);
  EXPECT_EQ(b, 0.0);
  EXPECT_EQ(a, -c);
}

TEST(Cli, PositionsNonLinearWarns) {
  const auto r = cli({"positions", "--n", "2", "--omega-ax", "2MHz"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
}

TEST(Cli, Transport) {
  const auto r = cli({"transport", "--dv", "280mV", "--t", "500us", "--shape", "linear",
                      "--out", tmp("traj.csv").string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("final_displacement_m=1.4"), std::string::npos);
  EXPECT_EQ(slurp(tmp("traj.csv")).rfind("t_s,x_cmd_m,x_min_m\n", 0), 0u);
  EXPECT_EQ(cli({"transport", "--shape", "cubic"}).code, 2);
  EXPECT_EQ(cli({"transport", "--dv", "3MHz"}).code, 2);
}

TEST(Cli, RunPrintsPerIon) {
  const auto r = cli({"run", seq("addressed_central.seq"), "--config", seq("three_ion.json"),
                      "--shots", "200", "--seed", "3"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("ion0 bright="), std::string::npos);
  EXPECT_NE(r.out.find("ion2 bright="), std::string::npos);
}

TEST(Cli, ScanByteIdenticalAndFit) {
  const auto a = tmp("a.csv"), b = tmp("b.csv"), c = tmp("c.csv");
  const std::vector<std::string> base{"scan", seq("mchange_scan.seq"), "--param", "detuning", "--from",
                                      "-15MHz", "--to", "15MHz", "--points", "31", "--shots",
                                      "400", "--seed", "42"};
  auto with = [&](std::vector<std::string> extra) {
    auto v = base;
    v.insert(v.end(), extra.begin(), extra.end());
    return v;
  };
  EXPECT_EQ(cli(with({"--out", a.string(), "--threads", "1"})).code, 0);
  EXPECT_EQ(cli(with({"--out", b.string(), "--threads", "4"})).code, 0);
  // Two invocations running concurrently.
  Out r1, r2;
  std::thread t1([&] { r1 = cli(with({"--out", c.string(), "--threads", "2"})); });
  std::thread t2([&] { r2 = cli(with({"--threads", "3"})); });
  t1.join();
  t2.join();
  EXPECT_EQ(r1.code, 0);
  const auto text = slurp(a);
  EXPECT_EQ(text, slurp(b));
  EXPECT_EQ(text, slurp(c));
  EXPECT_EQ(text, r2.out);
  EXPECT_EQ(text.rfind("detuning_hz,ion0_p,ion0_err\n", 0), 0u);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 32);

  const auto fit = cli({"fit", "--in", a.string(), "--ion", "0"});
  EXPECT_EQ(fit.code, 0) << fit.err;
  const auto j = nlohmann::json::parse(fit.out);
  EXPECT_TRUE(j["converged"].get<bool>());
  EXPECT_GT(j["center_hz"].get<double>(), 0.0);
  EXPECT_EQ(cli({"fit", "--in", a.string(), "--ion", "4"}).code, 2);
}

TEST(Cli, ScanBackgroundAnnotation) {
  const auto p = tmp("bg.csv");
  const auto r = cli({"scan", seq("addressed_central.seq"), "--config", seq("three_ion.json"),
                      "--from", "-15MHz", "--to", "15MHz", "--points", "13", "--shots", "2000",
                      "--background", "0.08", "--addressed", "1", "--out", p.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto text = slurp(p);
  EXPECT_NE(text.find("ion1_p_raw"), std::string::npos);
  const auto fit = cli({"fit", "--in", p.string(), "--ion", "1"});
  ASSERT_EQ(fit.code, 0) << fit.err;
  EXPECT_EQ(nlohmann::json::parse(fit.out)["corrections"][0]["value"], 0.08);
  EXPECT_EQ(cli({"scan", seq("mchange_scan.seq"), "--from", "0", "--to", "1MHz", "--background", "0.1"}).code, 2);
}

TEST(Cli, TraceFile) {
  const auto p = tmp("trace.txt");
  const auto r = cli({"run", seq("mchange_scan.seq"), "--shots", "20", "--detuning", "2.8MHz",
                      "--trace", p.string()});
  EXPECT_EQ(r.code, 0);
  const auto text = slurp(p);
  EXPECT_EQ(text.rfind("shot=0\n", 0), 0u);
}

TEST(Cli, DoesNotModifyInputs) {
  const auto before = slurp(seq("mchange_scan.seq"));
  cli({"parse", seq("mchange_scan.seq")});
  cli({"run", seq("mchange_scan.seq"), "--shots", "10"});
  EXPECT_EQ(slurp(seq("mchange_scan.seq")), before);
}
