#pragma once

// Shot-by-shot Monte Carlo execution of pulse programs on an ion register.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rydsim/config.hpp"
#include "rydsim/scan_result.hpp"
#include "rydsim/sequence.hpp"

namespace rydsim {

/// Every ion starts each shot in |S1/2, -1/2>.
inline ZeemanState initial_state() { return {Term::S12, HalfInt::from_twice(-1)}; }

/// Result of one shot. bright[i] is true iff ion i ended in S1/2 or D3/2.
struct ShotOutcome {
  std::vector<bool> bright;
  std::vector<ZeemanState> final_states;
  std::vector<std::string> log;  ///< filled only when tracing
};

struct RunOptions {
  std::uint64_t shots = 1000;
  std::uint64_t seed = 0;
  double vuv_detuning = 0.0;    ///< Hz, added to every VUV exposure
  std::uint64_t grid_index = 0; ///< enters the per-shot seed
  unsigned threads = 0;         ///< 0: hardware concurrency
  bool trace = false;
};

struct RunResult {
  std::uint64_t shots = 0;
  Signal signal = Signal::Bright;
  std::vector<std::uint64_t> bright_counts;
  std::vector<std::string> trace;

  std::size_t n_ions() const { return bright_counts.size(); }
  double bright_fraction(std::size_t ion) const;
  /// Bright or dark fraction depending on the program's detect signal.
  double signal_probability(std::size_t ion) const;
  /// sqrt(p (1 - p) / shots)
  double signal_error(std::size_t ion) const;
};

/// A validated (program, config) pair with the crystal geometry resolved.
class Experiment {
 public:
  /// Throws InputError when the program addresses an ion the crystal does not
  /// have or pulses need a beam with zero Rabi frequency.
  Experiment(PulseProgram program, ExperimentConfig config);

  const PulseProgram& program() const { return program_; }
  const ExperimentConfig& config() const { return config_; }
  const std::vector<double>& initial_positions() const { return positions_; }

  /// One shot on its own RNG stream.
  ShotOutcome run_shot(std::uint64_t shot_seed, double vuv_detuning, bool trace) const;

  /// Shot i uses derive_seed(seed, i, grid_index); the result does not depend
  /// on the thread count.
  RunResult run(const RunOptions& options) const;

  /// One run per grid point (grid index k for point k). The grid must be
  /// non-empty and strictly increasing.
  ScanResult scan(const std::vector<double>& grid, std::uint64_t shots, std::uint64_t seed,
                  unsigned threads = 0, std::vector<std::string>* trace = nullptr) const;

 private:
  PulseProgram program_;
  ExperimentConfig config_;
  LineShape shape_;
  std::vector<double> positions_;
};

RunResult run(const PulseProgram& program, const ExperimentConfig& config,
              const RunOptions& options);

ScanResult scan(const PulseProgram& program, const ExperimentConfig& config,
                const std::vector<double>& grid, std::uint64_t shots, std::uint64_t seed,
                unsigned threads = 0);

/// `points` evenly spaced values from `from` to `to` inclusive.
std::vector<double> linear_grid(double from, double to, std::size_t points);

}  // namespace rydsim
