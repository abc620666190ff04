#pragma once

// Axial geometry of a linear ion crystal and transport of the crystal by
// segment-voltage ramps.

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace rydsim {

namespace constants {
inline constexpr double kElementaryCharge = 1.602176634e-19;     // C
inline constexpr double kVacuumPermittivity = 8.8541878128e-12;  // F/m
inline constexpr double kHbar = 1.054571817e-34;                 // J s
inline constexpr double kAtomicMassUnit = 1.66053906660e-27;     // kg
inline constexpr double kCalcium40Mass = 39.962590863 * kAtomicMassUnit;
}  // namespace constants

struct TrapConfig {
  double omega_ax = 2.0 * 3.14159265358979323846 * 600e3;   ///< rad/s
  double omega_rad = 2.0 * 3.14159265358979323846 * 1.5e6;  ///< rad/s
  double ion_mass = constants::kCalcium40Mass;              ///< kg
  double ion_charge = constants::kElementaryCharge;         ///< C

  /// Throws InputError unless every field is positive and finite.
  void validate() const;
  /// omega_ax < omega_rad; a linear chain is not guaranteed otherwise.
  bool is_linear() const { return omega_ax < omega_rad; }
  /// (q^2 / (4 pi eps0 m omega_ax^2))^(1/3), m.
  double length_scale() const;
};

/// Equilibrium axial positions of `n_ions` in the harmonic well, ascending and
/// centered on zero. Throws InputError for n_ions == 0 and NumericError if the
/// Newton iteration fails to converge.
std::vector<double> equilibrium_positions(std::size_t n_ions, const TrapConfig& trap);

/// Same, in units of TrapConfig::length_scale().
std::vector<double> equilibrium_positions_dimensionless(std::size_t n_ions);

/// Gradient of the dimensionless potential sum(u_i^2)/2 + sum_{i<j} 1/|u_i - u_j|.
std::vector<double> equilibrium_gradient(const std::vector<double>& u);

enum class RampShape { Linear, SmoothStep };

struct TransportRamp {
  double delta_v = 0.280;           ///< V
  double kappa = 50e-6;             ///< m/V
  double duration = 500e-6;         ///< s
  RampShape shape = RampShape::Linear;
  double filter_cutoff = 50e3;      ///< Hz; +inf bypasses the filter

  void validate() const;
  double final_displacement() const { return kappa * delta_v; }
  /// Commanded voltage fraction in [0, 1] at time t.
  double profile(double t) const;
};

struct TrajectorySample {
  double t = 0.0;      ///< s
  double x_cmd = 0.0;  ///< commanded displacement, m
  double x_min = 0.0;  ///< filtered potential-minimum position, m
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  /// Time constant of the filter that produced x_min; 0 when unfiltered.
  double filter_tau = 0.0;

  double final_position() const { return samples.empty() ? 0.0 : samples.back().x_min; }
};

/// Samples the ramp and its first-order low-pass response every `dt`, then
/// holds the endpoint for ten filter time constants (at least ten samples).
/// Throws InputError for dt > duration / 100 or dt <= 0.
Trajectory minimum_trajectory(const TransportRamp& ramp, double dt);

/// A trajectory that jumps by `displacement` at t = 0 and holds for `hold`.
Trajectory sudden_jump(double displacement, double hold);

/// Residual motional quanta E/(hbar omega) after driving a classical oscillator
/// at rest in x_min(t) with a fixed-step RK4 integrator. Throws InputError when
/// the trajectory is not monotone in time or does not hold its endpoint for
/// five filter time constants.
double residual_excitation(const Trajectory& trajectory, const TrapConfig& trap);

/// Writes "t_s,x_cmd_m,x_min_m" CSV.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

}  // namespace rydsim
