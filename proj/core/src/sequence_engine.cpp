#include "rydsim/sequence_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "rydsim/coherent_dynamics.hpp"
#include "rydsim/crystal_transport.hpp"
#include "rydsim/errors.hpp"
#include "rydsim/format.hpp"
#include "rydsim/rng.hpp"

namespace rydsim {

double RunResult::bright_fraction(std::size_t ion) const {
  return shots == 0 ? 0.0
                    : static_cast<double>(bright_counts.at(ion)) / static_cast<double>(shots);
}

double RunResult::signal_probability(std::size_t ion) const {
  const double b = bright_fraction(ion);
  return signal == Signal::Bright ? b : 1.0 - b;
}

double RunResult::signal_error(std::size_t ion) const {
  if (shots == 0) return 0.0;
  const double p = signal_probability(ion);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(shots));
}

namespace {

bool needs_beam(const PulseProgram& program) {
  return std::any_of(program.instructions.begin(), program.instructions.end(),
                     [](const Instruction& i) { return std::holds_alternative<PiPulse>(i); });
}

unsigned resolve_threads(unsigned requested, std::uint64_t work) {
  unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::uint64_t>(n, std::max<std::uint64_t>(work, 1)));
}

bool is_bright(const ZeemanState& s) { return s.term() == Term::S12 || s.term() == Term::D32; }

// Executes one shot; holds the per-shot mutable state.
class ShotRunner {
 public:
  ShotRunner(const ExperimentConfig& cfg, const LineShape& shape,
             const std::vector<double>& positions, std::uint64_t seed, double vuv_detuning,
             bool trace)
      : cfg_(cfg),
        shape_(shape),
        positions_(positions),
        states_(positions.size(), initial_state()),
        rng_(seed),
        vuv_detuning_(vuv_detuning),
        trace_(trace) {}

  ShotOutcome run(const PulseProgram& program) {
    for (const auto& ins : program.instructions) std::visit(*this, ins);
    ShotOutcome out;
    out.final_states = states_;
    out.bright.reserve(states_.size());
    for (const auto& s : states_) out.bright.push_back(is_bright(s));
    out.log = std::move(log_);
    return out;
  }

  void operator()(const Init& init) {
    for (auto& s : states_) s = init.state;
  }

  void operator()(const PiPulse& p) {
    const double pi_time = 1.0 / (2.0 * cfg_.beam.omega0);
    for (std::size_t i = 0; i < states_.size(); ++i) {
      const double transfer = pi_pulse_transfer(cfg_.pulse_fidelity, rabi_ratio(i));
      const ZeemanState before = states_[i];
      if (apply_pi_pulse(states_[i], p.lower, p.upper, transfer, rng_)) {
        note(i, "event=pi from=" + before.to_string() + " to=" + states_[i].to_string());
      }
    }
    clock_ += pi_time;
  }

  void operator()(const RabiPulse& p) {
    const double omega = 2.0 * std::numbers::pi * p.omega;
    const double delta = 2.0 * std::numbers::pi * p.detuning;
    for (std::size_t i = 0; i < states_.size(); ++i) {
      auto& s = states_[i];
      if (s != p.lower && s != p.upper) continue;
      const double transfer = rabi_transfer(omega * rabi_ratio(i), delta, p.t);
      if (rng_.bernoulli(transfer)) {
        const ZeemanState before = s;
        s = s == p.lower ? p.upper : p.lower;
        note(i, "event=rabi from=" + before.to_string() + " to=" + s.to_string());
      }
    }
    clock_ += p.t;
  }

  void operator()(const Vuv& v) {
    expose(v.t, vuv_detuning_ + v.detuning);
    clock_ += v.t;
  }

  void operator()(const Pump397&) {
    for (auto& s : states_) {
      if (s.term() == Term::S12 && rng_.bernoulli(cfg_.pump397_fidelity)) {
        s = ZeemanState::d32_aggregate();
      }
    }
  }

  void operator()(const Pump393&) {
    static const auto d52 = sublevels(Term::D52);
    for (auto& s : states_) {
      if (s.term() == Term::S12 && rng_.bernoulli(cfg_.pump393_fidelity)) {
        s = d52[rng_.index(d52.size())];
      }
    }
  }

  void operator()(const Transport& t) {
    const double dz = t.dz ? *t.dz : cfg_.kappa * *t.dv;
    for (auto& x : positions_) x += dz;
    clock_ += t.t;
  }

  void operator()(const Detect& d) {
    const double exposure = d.vuv_exposure ? *d.vuv_exposure : (cfg_.vuv_unswitched ? d.t : 0.0);
    if (exposure > 0.0) expose(exposure, vuv_detuning_);
    clock_ += d.t;
  }

 private:
  double rabi_ratio(std::size_t ion) const {
    const double r = (positions_[ion] - cfg_.beam.center) / cfg_.beam.waist;
    return std::exp(-r * r);
  }

  void expose(double duration, double detuning) {
    for (std::size_t i = 0; i < states_.size(); ++i) {
      if (states_[i].term() != Term::D52) continue;
      if (trace_) {
        EventLog events;
        vuv_exposure(states_[i], duration, detuning, shape_, cfg_.rydberg, rng_, &events,
                     clock_);
        for (const auto& e : events) log_.push_back(e.to_log_line() + " ion=" + std::to_string(i));
      } else {
        vuv_exposure(states_[i], duration, detuning, shape_, cfg_.rydberg, rng_);
      }
    }
  }

  void note(std::size_t ion, const std::string& what) {
    if (trace_) {
      log_.push_back("t=" + format_double(clock_) + " " + what + " ion=" + std::to_string(ion));
    }
  }

  const ExperimentConfig& cfg_;
  const LineShape& shape_;
  std::vector<double> positions_;
  std::vector<ZeemanState> states_;
  Rng rng_;
  double vuv_detuning_;
  bool trace_;
  double clock_ = 0.0;
  std::vector<std::string> log_;
};

}  // namespace

Experiment::Experiment(PulseProgram program, ExperimentConfig config)
    : program_(std::move(program)), config_(std::move(config)), shape_(config_.line_shape()) {
  config_.validate();
  if (program_.instructions.empty() || !std::holds_alternative<Detect>(program_.instructions.back())) {
    throw InputError("program must end with a detect instruction");
  }
  if (auto max_ion = program_.max_ion_index(); max_ion && *max_ion >= config_.n_ions) {
    throw InputError("program addresses ion " + std::to_string(*max_ion) + " but the crystal has " +
                     std::to_string(config_.n_ions) + " ion(s)");
  }
  if (needs_beam(program_) && !(config_.beam.omega0 > 0.0)) {
    throw InputError("pi pulses need beam.omega0_hz > 0");
  }
  positions_ = equilibrium_positions(config_.n_ions, config_.trap());
}

ShotOutcome Experiment::run_shot(std::uint64_t shot_seed, double vuv_detuning, bool trace) const {
  ShotRunner runner(config_, shape_, positions_, shot_seed, vuv_detuning, trace);
  return runner.run(program_);
}

RunResult Experiment::run(const RunOptions& options) const {
  if (options.shots == 0) throw InputError("shots must be >= 1");
  const std::size_t n = config_.n_ions;
  const unsigned n_threads = resolve_threads(options.threads, options.shots);

  std::vector<std::vector<std::uint64_t>> partial(n_threads, std::vector<std::uint64_t>(n, 0));
  std::vector<std::vector<std::string>> logs(options.trace ? options.shots : 0);

  auto worker = [&](unsigned w) {
    const std::uint64_t begin = options.shots * w / n_threads;
    const std::uint64_t end = options.shots * (w + 1) / n_threads;
    for (std::uint64_t shot = begin; shot < end; ++shot) {
      auto outcome = run_shot(derive_seed(options.seed, shot, options.grid_index),
                              options.vuv_detuning, options.trace);
      for (std::size_t i = 0; i < n; ++i) partial[w][i] += outcome.bright[i] ? 1 : 0;
      if (options.trace) logs[shot] = std::move(outcome.log);
    }
  };
  if (n_threads == 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (unsigned w = 0; w < n_threads; ++w) pool.emplace_back(worker, w);
  }

  RunResult result;
  result.shots = options.shots;
  result.signal = program_.detect().signal;
  result.bright_counts.assign(n, 0);
  for (const auto& part : partial) {
    for (std::size_t i = 0; i < n; ++i) result.bright_counts[i] += part[i];
  }
  for (std::uint64_t shot = 0; shot < logs.size(); ++shot) {
    if (logs[shot].empty()) continue;
    result.trace.push_back("shot=" + std::to_string(shot));
    for (auto& line : logs[shot]) result.trace.push_back(std::move(line));
  }
  return result;
}

ScanResult Experiment::scan(const std::vector<double>& grid, std::uint64_t shots,
                            std::uint64_t seed, unsigned threads,
                            std::vector<std::string>* trace) const {
  if (grid.empty()) throw InputError("scan grid must not be empty");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1])) throw InputError("scan grid must be strictly increasing");
  }
  ScanResult out;
  out.n_ions = config_.n_ions;
  out.shots = shots;
  out.detuning = grid;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    RunOptions opts;
    opts.shots = shots;
    opts.seed = seed;
    opts.vuv_detuning = grid[k];
    opts.grid_index = k;
    opts.threads = threads;
    opts.trace = trace != nullptr;
    const auto r = run(opts);
    std::vector<double> p(out.n_ions), e(out.n_ions);
    for (std::size_t i = 0; i < out.n_ions; ++i) {
      p[i] = r.signal_probability(i);
      e[i] = r.signal_error(i);
    }
    out.p.push_back(p);
    out.raw_p.push_back(p);
    out.err.push_back(e);
    if (trace) {
      for (const auto& line : r.trace) trace->push_back("point=" + std::to_string(k) + " " + line);
    }
  }
  return out;
}

RunResult run(const PulseProgram& program, const ExperimentConfig& config,
              const RunOptions& options) {
  return Experiment(program, config).run(options);
}

ScanResult scan(const PulseProgram& program, const ExperimentConfig& config,
                const std::vector<double>& grid, std::uint64_t shots, std::uint64_t seed,
                unsigned threads) {
  return Experiment(program, config).scan(grid, shots, seed, threads);
}

std::vector<double> linear_grid(double from, double to, std::size_t points) {
  if (points == 0) throw InputError("grid needs at least one point");
  if (points == 1) return {from};
  std::vector<double> g(points);
  for (std::size_t k = 0; k < points; ++k) {
    g[k] = from + (to - from) * static_cast<double>(k) / static_cast<double>(points - 1);
  }
  return g;
}

}  // namespace rydsim
