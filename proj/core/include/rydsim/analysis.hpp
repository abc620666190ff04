#pragma once

// Post-processing of detuning scans: composite line model, single-Gaussian
// least-squares fits and background bookkeeping.

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "rydsim/rydberg_channel.hpp"
#include "rydsim/scan_result.hpp"

namespace rydsim {

/// Components out of `initial` whose decay can change m; the stretched
/// channel that can only decay back to `initial` is dropped, as are zero weights.
std::vector<LineComponent> detectable_components(const LineShape& shape,
                                                 const ZeemanState& initial);

/// Sum of w_k exp(-(x - c_k)^2 / (2 sigma^2)) over `components`, at each grid point.
std::vector<double> model_profile(const std::vector<double>& grid,
                                  const std::vector<LineComponent>& components, double sigma);

/// model_profile over the detectable components of `initial` with the shape's sigma.
std::vector<double> model_profile(const std::vector<double>& grid, const LineShape& shape,
                                  const ZeemanState& initial);

/// Weight-averaged center of the components.
double profile_centroid(const std::vector<LineComponent>& components);

struct FitPoint {
  double x = 0.0;
  double y = 0.0;
  double err = 0.0;  ///< <= 0 means "no error given"
};

/// y = amplitude * exp(-(x - center)^2 / (2 sigma^2)) + offset
struct FitResult {
  double amplitude = 0.0;
  double center = 0.0;
  double sigma = 0.0;
  double offset = 0.0;
  std::array<double, 16> covariance{};  ///< row-major, order (amplitude, center, sigma, offset)
  bool converged = false;
  int iterations = 0;
  double chi2 = 0.0;
  std::vector<double> chi2_history;  ///< chi2 after each accepted step, starting with the initial guess

  double center_error() const;
  double sigma_error() const;
};

/// Smallest binomial standard error used as a fit weight.
inline constexpr double kMinFitError = 1e-3;

/// Damped Gauss-Newton fit started from weighted moments. Errors are floored at
/// kMinFitError; if no point carries an error, unit weights are used and the
/// covariance is scaled by chi2 / dof. Stops when the relative parameter step
/// falls below 1e-8 or after 200 iterations (converged = false, best so far).
/// Throws InputError for fewer than five points or data with zero variance.
FitResult fit_gaussian(const std::vector<FitPoint>& points);

/// One ion's column of a scan as fit input.
std::vector<FitPoint> scan_points(const ScanResult& scan, std::size_t ion);

/// Adds `background` to the signal columns of `ions` and records it. Raw
/// values are kept in raw_p. Throws InputError for an unknown ion or a
/// background outside [0, 1].
ScanResult annotate_background(ScanResult scan, const std::vector<std::size_t>& ions,
                               double background);

/// Subtracts every recorded correction again and clears the record.
ScanResult strip_corrections(ScanResult scan);

/// |center_a - center_b|. Throws InputError unless both fits converged.
double separation(const FitResult& a, const FitResult& b);

/// {"amplitude", "center_hz", "sigma_hz", "offset", "converged", "iterations",
///  "chi2"} plus "corrections" when any are given.
std::string fit_report_json(const FitResult& fit,
                            const std::vector<BackgroundCorrection>& corrections = {});

}  // namespace rydsim
