#include "rydsim/coherent_dynamics.hpp"

#include <cmath>
#include <numbers>

#include "rydsim/errors.hpp"

namespace rydsim {

void RabiDrive::validate() const {
  if (!(omega0 >= 0.0)) throw InputError("Rabi frequency must be >= 0");
  if (!(duration >= 0.0)) throw InputError("pulse duration must be >= 0");
  if (!(beam_waist > 0.0)) throw InputError("beam waist must be > 0");
}

double local_rabi_frequency(const RabiDrive& drive, double ion_position) {
  const double r = (ion_position - drive.beam_center) / drive.beam_waist;
  return drive.omega0 * std::exp(-r * r);
}

TwoLevelAmplitude evolve(const TwoLevelAmplitude& state, double omega, double detuning,
                         double t) {
  const double generalized = std::hypot(omega, detuning);
  if (generalized == 0.0 || t == 0.0) return state;
  const double half_angle = 0.5 * generalized * t;
  const double c = std::cos(half_angle);
  const double s = std::sin(half_angle);
  const double nx = omega / generalized;
  const double nz = detuning / generalized;
  // U = cos(a) I - i sin(a) (nx sigma_x + nz sigma_z), sigma_z = diag(+1, -1) on (lower, upper)
  const std::complex<double> u00{c, -s * nz};
  const std::complex<double> u11{c, s * nz};
  const std::complex<double> u01{0.0, -s * nx};
  return {u00 * state.lower + u01 * state.upper, u01 * state.lower + u11 * state.upper};
}

double rabi_transfer(double omega, double detuning, double t) {
  return evolve(TwoLevelAmplitude{}, omega, detuning, t).upper_population();
}

double pi_pulse_transfer(double fidelity, double rabi_ratio) {
  if (!(fidelity >= 0.0 && fidelity <= 1.0)) throw InputError("pulse fidelity must lie in [0, 1]");
  const double s = std::sin(0.5 * std::numbers::pi * rabi_ratio);
  return fidelity * s * s;
}

void require_quadrupole_pair(const ZeemanState& lower, const ZeemanState& upper) {
  if (lower.term() != Term::S12 ||
      !is_allowed(lower, upper, TransitionKind::Quadrupole729)) {
    throw SelectionRuleError("729 nm pulse cannot connect " + lower.to_string() + " and " +
                             upper.to_string() + " (needs S1/2 -> D5/2 with |dm| <= 2)");
  }
}

namespace {

void require_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InputError("pulse transfer probability must lie in [0, 1]");
}

}  // namespace

bool apply_pi_pulse(ZeemanState& state, const ZeemanState& lower, const ZeemanState& upper,
                    double transfer, Rng& rng) {
  require_quadrupole_pair(lower, upper);
  require_probability(transfer);
  if (state != lower && state != upper) return false;
  if (!rng.bernoulli(transfer)) return false;
  state = state == lower ? upper : lower;
  return true;
}

void apply_pi_pulse(SublevelPopulations& populations, const ZeemanState& lower,
                    const ZeemanState& upper, double transfer) {
  require_quadrupole_pair(lower, upper);
  require_probability(transfer);
  const double pl = populations.contains(lower) ? populations[lower] : 0.0;
  const double pu = populations.contains(upper) ? populations[upper] : 0.0;
  populations[lower] = (1.0 - transfer) * pl + transfer * pu;
  populations[upper] = (1.0 - transfer) * pu + transfer * pl;
}

}  // namespace rydsim
