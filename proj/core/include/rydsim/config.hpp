#pragma once

#include <cstddef>
#include <filesystem>
#include <string_view>

#include "rydsim/atomic_structure.hpp"
#include "rydsim/crystal_transport.hpp"
#include "rydsim/rydberg_channel.hpp"

namespace rydsim {

struct BeamConfig {
  double waist = 4e-6;     ///< m
  double center = 0.0;     ///< m
  double omega0 = 80e3;    ///< peak Rabi frequency Omega/2pi, Hz
};

/// Everything a run needs besides the program itself.
struct ExperimentConfig {
  double b_field = 0.28e-3;     ///< T
  double omega_ax = 600e3;      ///< axial secular frequency / 2pi, Hz
  double omega_rad = 1.5e6;     ///< radial secular frequency / 2pi, Hz
  std::size_t n_ions = 1;
  BeamConfig beam;
  double pulse_fidelity = 0.9;
  double pump393_fidelity = 0.9;
  double pump397_fidelity = 1.0;
  double sigma = 3.8e6;         ///< Hz, Gaussian width of one Zeeman component
  RydbergConfig rydberg;
  bool vuv_unswitched = false;
  double kappa = 50e-6;         ///< m/V
  double filter_cutoff = 50e3;  ///< Hz

  /// Throws InputError for out-of-range values.
  void validate() const;

  MagneticField field() const { return MagneticField(b_field); }
  TrapConfig trap() const;
  LineShape line_shape() const;
};

/// Parses the JSON config format. Every key is optional; unknown keys and
/// malformed values throw InputError.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace rydsim
