#pragma once

// Pulse-sequence programs and the line-oriented text format they are written in.
//
//   # comment
//   pulse pi   ion=1 from=S:-1/2 to=D5/2:-5/2
//   pulse rabi ion=1 from=S:-1/2 to=D5/2:-5/2 omega=80kHz detuning=0 t=6.25us
//   vuv t=1.5ms detuning=0MHz
//   pump 397
//   pump 393
//   transport dz=6.74um t=500us        (or dv=280mV, scaled by kappa at run time)
//   detect t=2ms signal=dark vuv=2ms
//
// Every program ends with exactly one detect.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rydsim/atomic_structure.hpp"

namespace rydsim {

/// Optical pumping of every ion into an S1/2 sublevel; first instruction only.
struct Init {
  ZeemanState state{Term::S12, HalfInt::from_twice(-1)};
};

struct PiPulse {
  std::size_t ion = 0;
  ZeemanState lower{Term::S12, HalfInt::from_twice(-1)};
  ZeemanState upper{Term::D52, HalfInt::from_twice(-5)};
};

struct RabiPulse {
  std::size_t ion = 0;
  ZeemanState lower{Term::S12, HalfInt::from_twice(-1)};
  ZeemanState upper{Term::D52, HalfInt::from_twice(-5)};
  double omega = 0.0;     ///< peak Rabi frequency Omega/2pi, Hz
  double detuning = 0.0;  ///< Hz
  double t = 0.0;         ///< s
};

struct Vuv {
  double t = 0.0;         ///< s
  double detuning = 0.0;  ///< Hz, added to the run's VUV detuning
};

struct Pump397 {};
struct Pump393 {};

struct Transport {
  std::optional<double> dz;  ///< m
  std::optional<double> dv;  ///< V
  double t = 0.0;            ///< s
};

enum class Signal { Bright, Dark };

struct Detect {
  double t = 0.0;                      ///< s
  Signal signal = Signal::Bright;      ///< which outcome counts as signal
  std::optional<double> vuv_exposure;  ///< s; defaults to t when VUV is unswitched
};

using Instruction = std::variant<Init, PiPulse, RabiPulse, Vuv, Pump397, Pump393, Transport, Detect>;

struct PulseProgram {
  std::vector<Instruction> instructions;
  std::vector<std::size_t> source_lines;  ///< 1-based line of each instruction

  const Detect& detect() const { return std::get<Detect>(instructions.back()); }
  /// Largest ion index any instruction addresses, if any.
  std::optional<std::size_t> max_ion_index() const;
};

/// Parses and validates a program. Throws ParseError (with line and column) on
/// syntax errors, unknown fields or state labels, selection-rule violations and
/// misplaced or duplicate detect instructions.
PulseProgram parse_program(std::string_view source);

/// One instruction in normalized form, SI values without unit suffixes.
std::string to_string(const Instruction& instruction);

/// The whole program, one normalized instruction per line.
std::string to_string(const PulseProgram& program);

}  // namespace rydsim
