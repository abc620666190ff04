#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rydsim {

/// Constant added to one ion's signal column.
struct BackgroundCorrection {
  std::size_t ion = 0;
  double background = 0.0;
};

/// Per-ion signal probability and binomial standard error over a detuning grid.
struct ScanResult {
  std::size_t n_ions = 0;
  std::uint64_t shots = 0;
  std::vector<double> detuning;              ///< Hz
  std::vector<std::vector<double>> p;        ///< [point][ion], corrections applied
  std::vector<std::vector<double>> err;      ///< [point][ion]
  std::vector<std::vector<double>> raw_p;    ///< [point][ion], as simulated
  std::vector<BackgroundCorrection> corrections;

  std::size_t size() const { return detuning.size(); }
  bool is_corrected(std::size_t ion) const;
};

/// "detuning_hz,ion0_p,ion0_err,..." followed by "ion<i>_p_raw" columns for
/// corrected ions. LF line endings, shortest round-trip decimals.
void write_scan_csv(std::ostream& out, const ScanResult& scan);

/// Reads the format written by write_scan_csv. A "_p_raw" column restores the
/// raw values and the constant correction. Throws InputError on malformed input.
ScanResult read_scan_csv(std::istream& in);

}  // namespace rydsim
