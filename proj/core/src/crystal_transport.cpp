#include "rydsim/crystal_transport.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "rydsim/errors.hpp"
#include "rydsim/format.hpp"

namespace rydsim {

void TrapConfig::validate() const {
  for (double v : {omega_ax, omega_rad, ion_mass, ion_charge}) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InputError("trap parameters must be positive");
  }
}

double TrapConfig::length_scale() const {
  const double k = ion_charge * ion_charge /
                   (4.0 * std::numbers::pi * constants::kVacuumPermittivity * ion_mass *
                    omega_ax * omega_ax);
  return std::cbrt(k);
}

namespace {

double potential(const std::vector<double>& u) {
  double v = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    v += 0.5 * u[i] * u[i];
    for (std::size_t j = i + 1; j < u.size(); ++j) v += 1.0 / std::abs(u[i] - u[j]);
  }
  return v;
}

double max_abs(const std::vector<double>& g) {
  double m = 0.0;
  for (double x : g) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

std::vector<double> equilibrium_gradient(const std::vector<double>& u) {
  std::vector<double> g(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    double gi = u[i];
    for (std::size_t j = 0; j < u.size(); ++j) {
      if (j == i) continue;
      const double d = u[i] - u[j];
      gi -= std::copysign(1.0 / (d * d), d);
    }
    g[i] = gi;
  }
  return g;
}

std::vector<double> equilibrium_positions_dimensionless(std::size_t n_ions) {
  if (n_ions == 0) throw InputError("crystal needs at least one ion");
  const std::size_t n = n_ions;
  std::vector<double> u(n);
  // Evenly spaced start with roughly the right extent.
  const double spacing = 2.0 * std::pow(static_cast<double>(n), -0.56);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = (static_cast<double>(i) - 0.5 * static_cast<double>(n - 1)) * spacing;
  }
  if (n == 1) return u;

  constexpr int kMaxIterations = 200;
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    const auto g = equilibrium_gradient(u);
    if (max_abs(g) < 1e-13) {
      // Enforce exact reflection symmetry left by round-off.
      for (std::size_t i = 0; i < n / 2; ++i) {
        const double a = 0.5 * (u[n - 1 - i] - u[i]);
        u[i] = -a;
        u[n - 1 - i] = a;
      }
      if (n % 2 == 1) u[n / 2] = 0.0;
      return u;
    }
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      h(i, i) = 1.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double c = 2.0 / std::pow(std::abs(u[i] - u[j]), 3);
        h(i, i) += c;
        h(i, j) = -c;
      }
    }
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) rhs(i) = -g[i];
    const Eigen::VectorXd step = h.llt().solve(rhs);

    // Damping: halve until the potential decreases and the ordering survives.
    const double v0 = potential(u);
    double lambda = 1.0;
    std::vector<double> trial(n);
    for (int k = 0; k < 50; ++k, lambda *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + lambda * step(i);
      if (std::is_sorted(trial.begin(), trial.end()) &&
          std::adjacent_find(trial.begin(), trial.end()) == trial.end() &&
          potential(trial) <= v0 + 1e-15 * std::abs(v0)) {
        break;
      }
    }
    u = trial;
  }
  throw NumericError("equilibrium positions did not converge for " + std::to_string(n_ions) +
                     " ions");
}

std::vector<double> equilibrium_positions(std::size_t n_ions, const TrapConfig& trap) {
  trap.validate();
  auto u = equilibrium_positions_dimensionless(n_ions);
  const double ell = trap.length_scale();
  for (double& x : u) x *= ell;
  return u;
}

void TransportRamp::validate() const {
  if (!(duration > 0.0)) throw InputError("transport duration must be > 0");
  if (!(filter_cutoff > 0.0)) throw InputError("filter cutoff must be > 0");
  if (!std::isfinite(delta_v) || !std::isfinite(kappa)) {
    throw InputError("transport voltage and coefficient must be finite");
  }
}

double TransportRamp::profile(double t) const {
  const double s = std::clamp(t / duration, 0.0, 1.0);
  switch (shape) {
    case RampShape::Linear:
      return s;
    case RampShape::SmoothStep:
      return s * s * (3.0 - 2.0 * s);
  }
  return s;
}

Trajectory minimum_trajectory(const TransportRamp& ramp, double dt) {
  ramp.validate();
  if (!(dt > 0.0) || dt > ramp.duration / 100.0 * (1.0 + 1e-12)) {
    throw InputError("sampling step must satisfy 0 < dt <= duration/100");
  }
  Trajectory traj;
  traj.filter_tau = std::isinf(ramp.filter_cutoff)
                        ? 0.0
                        : 1.0 / (2.0 * std::numbers::pi * ramp.filter_cutoff);

  const auto n_ramp = static_cast<std::size_t>(std::ceil(ramp.duration / dt - 1e-9));
  const double h = ramp.duration / static_cast<double>(n_ramp);
  const double hold = std::max(10.0 * traj.filter_tau, 10.0 * h);
  const auto n_hold = static_cast<std::size_t>(std::ceil(hold / h));
  const std::size_t n_total = n_ramp + n_hold;

  const double decay = traj.filter_tau > 0.0 ? std::exp(-h / traj.filter_tau) : 0.0;
  // Exact response of the first-order filter to a piecewise-linear input.
  const double slope_gain =
      traj.filter_tau > 0.0 ? (traj.filter_tau / h) * (1.0 - decay) : 0.0;

  traj.samples.reserve(n_total + 1);
  double u_prev = ramp.kappa * ramp.delta_v * ramp.profile(0.0);
  double y = u_prev;
  traj.samples.push_back({0.0, u_prev, y});
  for (std::size_t k = 1; k <= n_total; ++k) {
    const double t = static_cast<double>(k) * h;
    const double u = ramp.kappa * ramp.delta_v * ramp.profile(t);
    y = decay * y + u - decay * u_prev - (u - u_prev) * slope_gain;
    if (traj.filter_tau == 0.0) y = u;
    traj.samples.push_back({t, u, y});
    u_prev = u;
  }
  return traj;
}

Trajectory sudden_jump(double displacement, double hold) {
  Trajectory traj;
  traj.samples = {{0.0, 0.0, 0.0}, {0.0, displacement, displacement},
                  {hold, displacement, displacement}};
  return traj;
}

double residual_excitation(const Trajectory& trajectory, const TrapConfig& trap) {
  trap.validate();
  const auto& s = trajectory.samples;
  if (s.size() < 2) throw InputError("trajectory needs at least two samples");
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (!(s[k].t >= s[k - 1].t)) throw InputError("trajectory times must be non-decreasing");
  }
  if (s.front().x_cmd != s.front().x_min) {
    throw InputError("trajectory must start at rest (x_min == x_cmd at t0)");
  }
  const double t_end = s.back().t;
  const double required_hold = 5.0 * trajectory.filter_tau;
  const double x_end_cmd = s.back().x_cmd;
  double held_since = t_end;
  for (std::size_t k = s.size(); k-- > 0;) {
    if (s[k].x_cmd != x_end_cmd) break;
    held_since = s[k].t;
  }
  if (t_end - held_since < required_hold || t_end == held_since) {
    throw InputError("trajectory must hold its endpoint for at least five filter time constants");
  }

  const double w = trap.omega_ax;
  const double w2 = w * w;
  const double max_step = (2.0 * std::numbers::pi / w) / 200.0;

  double x = s.front().x_min;
  double v = 0.0;
  for (std::size_t k = 1; k < s.size(); ++k) {
    const double span = s[k].t - s[k - 1].t;
    if (span <= 0.0) continue;
    const double x0 = s[k - 1].x_min;
    const double slope = (s[k].x_min - x0) / span;
    const auto n = static_cast<std::size_t>(std::ceil(span / max_step));
    const double h = span / static_cast<double>(n);
    auto accel = [&](double tau, double pos) { return -w2 * (pos - (x0 + slope * tau)); };
    for (std::size_t i = 0; i < n; ++i) {
      const double tau = static_cast<double>(i) * h;
      const double k1x = v;
      const double k1v = accel(tau, x);
      const double k2x = v + 0.5 * h * k1v;
      const double k2v = accel(tau + 0.5 * h, x + 0.5 * h * k1x);
      const double k3x = v + 0.5 * h * k2v;
      const double k3v = accel(tau + 0.5 * h, x + 0.5 * h * k2x);
      const double k4x = v + h * k3v;
      const double k4v = accel(tau + h, x + h * k3x);
      x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
      v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
  }
  const double dx = x - s.back().x_min;
  const double energy = 0.5 * trap.ion_mass * (v * v + w2 * dx * dx);
  return energy / (constants::kHbar * w);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  out << "t_s,x_cmd_m,x_min_m\n";
  for (const auto& p : trajectory.samples) {
    out << format_double(p.t) << ',' << format_double(p.x_cmd) << ','
        << format_double(p.x_min) << '\n';
  }
}

}  // namespace rydsim
