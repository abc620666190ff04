#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "rydsim/analysis.hpp"
#include "rydsim/coherent_dynamics.hpp"
#include "rydsim/config.hpp"
#include "rydsim/crystal_transport.hpp"
#include "rydsim/sequence.hpp"
#include "rydsim/sequence_engine.hpp"

using namespace rydsim;

namespace {

std::string slurp(const std::string& rel) {
  std::ifstream in(std::string(RYDSIM_SOURCE_DIR) + "/" + rel);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void BM_Evolve(benchmark::State& state) {
  TwoLevelAmplitude a;
  double t = 1e-6;
  for (auto _ : state) {
    a = evolve(a, 5e5, 1e5, t);
    benchmark::DoNotOptimize(a);
  }
}
BENCHMARK(BM_Evolve);

void BM_VuvExposure(benchmark::State& state) {
  const ExperimentConfig cfg;
  const auto shape = cfg.line_shape();
  Rng rng(1);
  const ZeemanState init(Term::D52, HalfInt::from_twice(-5));
  for (auto _ : state) {
    auto s = init;
    vuv_exposure(s, 1.5e-3, 2.8e6, shape, cfg.rydberg, rng);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_VuvExposure);

void BM_RunMChangeScan(benchmark::State& state) {
  const Experiment exp(parse_program(slurp("sequences/mchange_scan.seq")), ExperimentConfig{});
  RunOptions o;
  o.shots = static_cast<std::uint64_t>(state.range(0));
  o.vuv_detuning = 2.8e6;
  o.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(exp.run(o));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunMChangeScan)->Arg(1000)->Arg(10000);

void BM_RunAddressed(benchmark::State& state) {
  auto cfg = load_config(std::string(RYDSIM_SOURCE_DIR) + "/sequences/three_ion.json");
  const Experiment exp(parse_program(slurp("sequences/addressed_central.seq")), cfg);
  RunOptions o;
  o.shots = 10000;
  o.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(exp.run(o));
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_RunAddressed);

void BM_FitGaussian(benchmark::State& state) {
  std::vector<FitPoint> pts;
  for (int i = 0; i < 61; ++i) {
    const double x = -15e6 + 0.5e6 * i;
    pts.push_back({x, 0.2 * std::exp(-0.5 * std::pow((x - 2.8e6) / 4.6e6, 2)) + 0.01 * std::sin(i),
                   0.01});
  }
  for (auto _ : state) benchmark::DoNotOptimize(fit_gaussian(pts));
}
BENCHMARK(BM_FitGaussian);

void BM_Equilibrium(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(equilibrium_positions_dimensionless(n));
}
BENCHMARK(BM_Equilibrium)->Arg(3)->Arg(10)->Arg(30);

void BM_ResidualExcitation(benchmark::State& state) {
  const TransportRamp ramp;
  const auto traj = minimum_trajectory(ramp, ramp.duration / 1000);
  const TrapConfig trap;
  for (auto _ : state) benchmark::DoNotOptimize(residual_excitation(traj, trap));
}
BENCHMARK(BM_ResidualExcitation);

}  // namespace
BENCHMARK_MAIN();
