#pragma once

// Coherent driving of the 729 nm qubit transition by a focused addressing beam.

#include <complex>
#include <map>

#include "rydsim/atomic_structure.hpp"
#include "rydsim/rng.hpp"

namespace rydsim {

struct RabiDrive {
  double omega0 = 0.0;       ///< peak angular Rabi frequency, rad/s
  double detuning = 0.0;     ///< angular detuning, rad/s
  double duration = 0.0;     ///< s
  double beam_waist = 4e-6;  ///< m
  double beam_center = 0.0;  ///< axial position, m

  /// Throws InputError on negative omega0/duration or non-positive waist.
  void validate() const;
};

/// Rabi frequency seen by an ion at `ion_position`: omega0 * exp(-r^2 / w0^2).
double local_rabi_frequency(const RabiDrive& drive, double ion_position);

struct TwoLevelAmplitude {
  std::complex<double> lower{1.0, 0.0};
  std::complex<double> upper{0.0, 0.0};

  double upper_population() const { return std::norm(upper); }
  double norm() const { return std::norm(lower) + std::norm(upper); }
};

/// Exact rotating-frame propagator for H = (hbar/2)[[delta, Omega], [Omega, -delta]]
/// acting on (lower, upper) for time t.
TwoLevelAmplitude evolve(const TwoLevelAmplitude& state, double omega, double detuning,
                         double t);

/// Upper-state population after time t starting from the lower state.
double rabi_transfer(double omega, double detuning, double t);

/// Probability that a pulse calibrated as a pi pulse for the beam-center Rabi
/// frequency swaps an ion that sees `rabi_ratio` = Omega_local / Omega_0:
/// fidelity * sin^2(pi/2 * rabi_ratio).
double pi_pulse_transfer(double fidelity, double rabi_ratio = 1.0);

/// Sampled pi pulse on the (lower <-> upper) quadrupole pair. With probability
/// `transfer` an ion in either connected sublevel is moved to the other one;
/// other sublevels are untouched. Returns true if the state changed.
/// Throws SelectionRuleError for a pair the 729 nm transition does not connect,
/// InputError for transfer outside [0, 1].
bool apply_pi_pulse(ZeemanState& state, const ZeemanState& lower, const ZeemanState& upper,
                    double transfer, Rng& rng);

/// Population-level form of the same channel.
using SublevelPopulations = std::map<ZeemanState, double>;
void apply_pi_pulse(SublevelPopulations& populations, const ZeemanState& lower,
                    const ZeemanState& upper, double transfer);

/// Checks that (lower, upper) is a 729 nm pair with S1/2 as the lower level.
void require_quadrupole_pair(const ZeemanState& lower, const ZeemanState& upper);

}  // namespace rydsim
