#include "rydsim/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"
#include "rydsim/errors.hpp"

namespace rydsim {

std::vector<LineComponent> detectable_components(const LineShape& shape,
                                                 const ZeemanState& initial) {
  std::vector<LineComponent> out;
  for (const auto& c : shape.components_from(initial)) {
    if (c.weight <= 0.0) continue;
    const auto decays = allowed_targets(c.channel.to, TransitionKind::DipoleDecay, Term::D52);
    if (decays.size() == 1 && decays.front() == initial) continue;
    out.push_back(c);
  }
  return out;
}

std::vector<double> model_profile(const std::vector<double>& grid,
                                  const std::vector<LineComponent>& components, double sigma) {
  if (!(sigma > 0.0)) throw InputError("profile sigma must be > 0");
  std::vector<double> out(grid.size(), 0.0);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!std::isfinite(grid[k])) throw InputError("profile grid must be finite");
    for (const auto& c : components) {
      const double d = grid[k] - c.center;
      out[k] += c.weight * std::exp(-d * d * inv);
    }
  }
  return out;
}

std::vector<double> model_profile(const std::vector<double>& grid, const LineShape& shape,
                                  const ZeemanState& initial) {
  return model_profile(grid, detectable_components(shape, initial), shape.sigma());
}

double profile_centroid(const std::vector<LineComponent>& components) {
  double sw = 0.0;
  double swc = 0.0;
  for (const auto& c : components) {
    sw += c.weight;
    swc += c.weight * c.center;
  }
  if (sw <= 0.0) throw InputError("centroid of an empty profile");
  return swc / sw;
}

double FitResult::center_error() const { return std::sqrt(std::max(0.0, covariance[5])); }
double FitResult::sigma_error() const { return std::sqrt(std::max(0.0, covariance[10])); }

namespace {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

double model(const Vec4& q, double x) {
  const double z = (x - q[1]) / q[2];
  return q[0] * std::exp(-0.5 * z * z) + q[3];
}

struct Normal {
  Mat4 jtj = Mat4::Zero();
  Vec4 jtr = Vec4::Zero();
  double chi2 = 0.0;
};

Normal normal_equations(const std::vector<FitPoint>& pts, const std::vector<double>& w,
                        const Vec4& q) {
  Normal n;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double z = (pts[i].x - q[1]) / q[2];
    const double e = std::exp(-0.5 * z * z);
    Vec4 grad;
    grad << e, q[0] * e * z / q[2], q[0] * e * z * z / q[2], 1.0;
    const double r = pts[i].y - (q[0] * e + q[3]);
    n.jtj.noalias() += w[i] * grad * grad.transpose();
    n.jtr.noalias() += w[i] * r * grad;
    n.chi2 += w[i] * r * r;
  }
  return n;
}

double chi2_of(const std::vector<FitPoint>& pts, const std::vector<double>& w, const Vec4& q) {
  double c = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double r = pts[i].y - model(q, pts[i].x);
    c += w[i] * r * r;
  }
  return c;
}

Vec4 moment_guess(const std::vector<FitPoint>& pts, const std::vector<double>& w) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& p : pts) {
    lo = std::min(lo, p.y);
    hi = std::max(hi, p.y);
  }
  if (!(hi > lo)) throw InputError("cannot fit a Gaussian to data with zero variance");

  // Orient the peak away from the median so dips fit as well as peaks.
  std::vector<double> ys;
  for (const auto& p : pts) ys.push_back(p.y);
  std::nth_element(ys.begin(), ys.begin() + static_cast<std::ptrdiff_t>(ys.size() / 2), ys.end());
  const double median = ys[ys.size() / 2];
  const bool dip = (median - lo) > (hi - median);
  const double base = dip ? hi : lo;

  double s0 = 0.0, s1 = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double h = std::abs(pts[i].y - base) * w[i];
    s0 += h;
    s1 += h * pts[i].x;
  }
  const double c = s1 / s0;
  double s2 = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = pts[i].x - c;
    s2 += std::abs(pts[i].y - base) * w[i] * d * d;
  }
  double sigma = std::sqrt(s2 / s0);
  auto [xmin, xmax] = std::minmax_element(pts.begin(), pts.end(),
                                          [](const auto& a, const auto& b) { return a.x < b.x; });
  const double span = xmax->x - xmin->x;
  if (!(sigma > 0.0)) sigma = span / 4.0;
  sigma = std::clamp(sigma, span / (4.0 * static_cast<double>(pts.size())), span);
  Vec4 q;
  q << (dip ? lo - hi : hi - lo), c, sigma, base;
  return q;
}

}  // namespace

FitResult fit_gaussian(const std::vector<FitPoint>& points) {
  if (points.size() < 5) throw InputError("a Gaussian fit needs at least 5 points");
  for (const auto& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw InputError("fit data must be finite");
  }
  const bool weighted = std::any_of(points.begin(), points.end(),
                                    [](const FitPoint& p) { return p.err > 0.0; });
  std::vector<double> w(points.size(), 1.0);
  if (weighted) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double e = std::max(points[i].err, kMinFitError);
      w[i] = 1.0 / (e * e);
    }
  }

  Vec4 q = moment_guess(points, w);
  double chi2 = chi2_of(points, w, q);
  FitResult out;
  out.chi2_history.push_back(chi2);

  constexpr int kMaxIterations = 200;
  constexpr double kTolerance = 1e-8;
  double lambda = 1e-3;
  bool converged = false;
  int iter = 0;
  for (; iter < kMaxIterations && !converged; ++iter) {
    const Normal n = normal_equations(points, w, q);
    bool accepted = false;
    while (!accepted) {
      Mat4 a = n.jtj;
      for (int k = 0; k < 4; ++k) a(k, k) += lambda * std::max(n.jtj(k, k), 1e-300);
      const Vec4 step = a.ldlt().solve(n.jtr);
      Vec4 trial = q + step;
      trial[2] = std::abs(trial[2]);
      const double trial_chi2 =
          (trial[2] > 0.0 && step.allFinite()) ? chi2_of(points, w, trial)
                                               : std::numeric_limits<double>::infinity();
      if (trial_chi2 <= chi2) {
        const double amp_scale = std::max(std::abs(trial[0]), std::abs(trial[3]));
        const std::array<double, 4> scale = {std::max(std::abs(trial[0]), amp_scale),
                                             trial[2], trial[2],
                                             std::max(std::abs(trial[3]), amp_scale)};
        double rel = 0.0;
        for (int k = 0; k < 4; ++k) rel = std::max(rel, std::abs(step[k]) / scale[k]);
        q = trial;
        chi2 = trial_chi2;
        out.chi2_history.push_back(chi2);
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        converged = rel < kTolerance;
      } else {
        lambda *= 10.0;
        if (lambda > 1e12) {
          // No downhill step left at working precision: q is the minimum.
          converged = true;
          break;
        }
      }
    }
  }

  out.amplitude = q[0];
  out.center = q[1];
  out.sigma = q[2];
  out.offset = q[3];
  out.converged = converged;
  out.iterations = iter;
  out.chi2 = chi2;

  const Normal n = normal_equations(points, w, q);
  Mat4 cov = n.jtj.inverse();
  if (!weighted && points.size() > 4) cov *= chi2 / static_cast<double>(points.size() - 4);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) out.covariance[static_cast<std::size_t>(4 * r + c)] = cov(r, c);
  }
  return out;
}

std::vector<FitPoint> scan_points(const ScanResult& scan, std::size_t ion) {
  if (ion >= scan.n_ions) {
    throw InputError("scan has no ion " + std::to_string(ion));
  }
  std::vector<FitPoint> pts;
  pts.reserve(scan.size());
  for (std::size_t k = 0; k < scan.size(); ++k) {
    pts.push_back({scan.detuning[k], scan.p[k][ion], scan.err[k][ion]});
  }
  return pts;
}

ScanResult annotate_background(ScanResult scan, const std::vector<std::size_t>& ions,
                               double background) {
  if (!(background >= 0.0 && background <= 1.0)) {
    throw InputError("background must lie in [0, 1]");
  }
  for (std::size_t ion : ions) {
    if (ion >= scan.n_ions) throw InputError("scan has no ion " + std::to_string(ion));
  }
  if (scan.raw_p.size() != scan.p.size()) scan.raw_p = scan.p;
  for (std::size_t ion : ions) {
    for (auto& row : scan.p) row[ion] += background;
    scan.corrections.push_back({ion, background});
  }
  return scan;
}

ScanResult strip_corrections(ScanResult scan) {
  for (const auto& c : scan.corrections) {
    for (auto& row : scan.p) row[c.ion] -= c.background;
  }
  scan.corrections.clear();
  return scan;
}

double separation(const FitResult& a, const FitResult& b) {
  if (!a.converged || !b.converged) throw InputError("separation needs two converged fits");
  return std::abs(a.center - b.center);
}

std::string fit_report_json(const FitResult& fit,
                            const std::vector<BackgroundCorrection>& corrections) {
  nlohmann::ordered_json j;
  j["amplitude"] = fit.amplitude;
  j["center_hz"] = fit.center;
  j["sigma_hz"] = fit.sigma;
  j["offset"] = fit.offset;
  j["converged"] = fit.converged;
  j["iterations"] = fit.iterations;
  j["chi2"] = fit.chi2;
  if (!corrections.empty()) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& c : corrections) {
      arr.push_back({{"ion", c.ion}, {"kind", "constant_background"}, {"value", c.background}});
    }
    j["corrections"] = arr;
  }
  return j.dump(2) + "\n";
}

}  // namespace rydsim
