#include <gtest/gtest.h>

#include <random>

#include "json.hpp"
#include "rydsim/analysis.hpp"
#include "rydsim/errors.hpp"
#include "rydsim/sequence_engine.hpp"

using namespace rydsim;

namespace {

ZeemanState st(Term t, int twice_m) { return {t, HalfInt::from_twice(twice_m)}; }

double gauss(double a, double c, double s, double b, double x) {
  return a * std::exp(-0.5 * (x - c) * (x - c) / (s * s)) + b;
}

std::vector<FitPoint> gaussian_points(double a, double c, double s, double b, double lo, double hi,
                                      int n) {
  std::vector<FitPoint> pts;
  for (int i = 0; i < n; ++i) {
    const double x = lo + (hi - lo) * i / (n - 1);
    pts.push_back({x, gauss(a, c, s, b, x), 0.0});
  }
  return pts;
}

LineShape shape() { return LineShape(MagneticField(0.28e-3), 3.8e6, ChannelWeights::equal()); }

}  // namespace

TEST(ModelProfile, SingleComponentPeaksAtCenter) {
  const std::vector<LineComponent> comps{{{st(Term::D52, -5), st(Term::F72, -5)}, 1.2e6, 0.7}};
  const auto grid = linear_grid(-10e6, 10e6, 201);
  const auto y = model_profile(grid, comps, 2e6);
  const auto it = std::max_element(y.begin(), y.end());
  EXPECT_NEAR(grid[it - y.begin()], 1.2e6, 0.05e6);
  EXPECT_NEAR(*it, 0.7, 1e-2);
}

TEST(ModelProfile, DetectableComponentsAndCentroid) {
  const auto comps = detectable_components(shape(), st(Term::D52, -5));
  ASSERT_EQ(comps.size(), 2u);
  EXPECT_NEAR(comps[0].center, 0.560e6, 1e3);
  EXPECT_NEAR(comps[1].center, 5.039e6, 1e3);
  EXPECT_NEAR(profile_centroid(comps), 2.80e6, 1e4);
  const auto plus = detectable_components(shape(), st(Term::D52, 5));
  EXPECT_NEAR(profile_centroid(plus), -2.80e6, 1e4);
  EXPECT_NEAR(profile_centroid(comps) - profile_centroid(plus), 5.60e6, 1e4);
}

TEST(ModelProfile, ReflectionInvariance) {
  const auto grid = linear_grid(-15e6, 15e6, 61);
  std::vector<double> mirrored;
  for (auto it = grid.rbegin(); it != grid.rend(); ++it) mirrored.push_back(-*it);
  for (int tm = -5; tm <= 5; tm += 2) {
    const auto a = model_profile(grid, shape(), st(Term::D52, tm));
    const auto b = model_profile(mirrored, shape(), st(Term::D52, -tm));
    for (std::size_t k = 0; k < grid.size(); ++k) {
      EXPECT_NEAR(a[k], b[grid.size() - 1 - k], 1e-12);
    }
  }
}

TEST(ModelProfile, Errors) {
  EXPECT_THROW(model_profile({0.0}, {}, 0.0), InputError);
  EXPECT_THROW(model_profile({std::nan("")}, {}, 1.0), InputError);
}

TEST(Fit, NoiselessRecovery) {
  const auto pts = gaussian_points(0.3, 2.1e6, 4.4e6, 0.02, -15e6, 15e6, 61);
  const auto f = fit_gaussian(pts);
  ASSERT_TRUE(f.converged);
  EXPECT_NEAR(f.amplitude, 0.3, 1e-9 * 0.3);
  EXPECT_NEAR(f.center, 2.1e6, 1e-9 * 4.4e6);
  EXPECT_NEAR(f.sigma, 4.4e6, 1e-9 * 4.4e6);
  EXPECT_NEAR(f.offset, 0.02, 1e-9 * 0.3);
}

TEST(Fit, NoiselessDip) {
  const auto pts = gaussian_points(-0.5, -1e6, 2e6, 0.9, -10e6, 10e6, 41);
  const auto f = fit_gaussian(pts);
  ASSERT_TRUE(f.converged);
  EXPECT_NEAR(f.amplitude, -0.5, 1e-9);
  EXPECT_NEAR(f.center, -1e6, 1e-3);
}

TEST(Fit, ChiSquareNonIncreasing) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> n(0.0, 0.01);
  auto pts = gaussian_points(0.25, 1e6, 5e6, 0.05, -15e6, 15e6, 61);
  for (auto& p : pts) {
    p.y += n(gen);
    p.err = 0.01;
  }
  const auto f = fit_gaussian(pts);
  ASSERT_TRUE(f.converged);
  EXPECT_GT(f.sigma, 0.0);
  for (std::size_t i = 1; i < f.chi2_history.size(); ++i) {
    EXPECT_LE(f.chi2_history[i], f.chi2_history[i - 1]);
  }
}

TEST(Fit, ShiftAndScaleEquivariance) {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> n(0.0, 0.01);
  auto pts = gaussian_points(0.25, 1e6, 5e6, 0.05, -15e6, 15e6, 61);
  for (auto& p : pts) p.y += n(gen);
  const auto f = fit_gaussian(pts);
  auto shifted = pts;
  for (auto& p : shifted) p.x += 3e6;
  const auto fs = fit_gaussian(shifted);
  EXPECT_NEAR(fs.center - f.center, 3e6, 1e-9 * 5e6);
  EXPECT_NEAR(fs.sigma, f.sigma, 1e-9 * f.sigma);
  auto scaled = pts;
  for (auto& p : scaled) p.y *= 3.5;
  const auto fk = fit_gaussian(scaled);
  EXPECT_NEAR(fk.amplitude, 3.5 * f.amplitude, 1e-9 * std::abs(3.5 * f.amplitude));
  EXPECT_NEAR(fk.offset, 3.5 * f.offset, 1e-9 * std::abs(3.5 * f.amplitude));
  EXPECT_NEAR(fk.center, f.center, 1e-9 * f.sigma);
  EXPECT_NEAR(fk.sigma, f.sigma, 1e-9 * f.sigma);
}

TEST(Fit, SingleComponentProfileRecoversCenter) {
  const std::vector<LineComponent> comps{{{st(Term::D52, -5), st(Term::F72, -5)}, 0.56e6, 1.0}};
  const auto grid = linear_grid(-15e6, 15e6, 61);
  const auto y = model_profile(grid, comps, 3.8e6);
  std::vector<FitPoint> pts;
  for (std::size_t k = 0; k < grid.size(); ++k) pts.push_back({grid[k], y[k], 0.0});
  const auto f = fit_gaussian(pts);
  EXPECT_NEAR(f.center, 0.56e6, 1e-6 * 3.8e6);
}

TEST(Fit, PullStudy) {
  // Seeded Gaussian noise with known errors: pulls of center and sigma ~ N(0, 1).
  std::mt19937_64 gen(17);
  const double a = 0.3, c = 1.5e6, s = 4.5e6, b = 0.05, e = 0.015;
  std::normal_distribution<double> noise(0.0, e);
  std::vector<double> pc, ps;
  for (int trial = 0; trial < 400; ++trial) {
    auto pts = gaussian_points(a, c, s, b, -15e6, 15e6, 61);
    for (auto& p : pts) {
      p.y += noise(gen);
      p.err = e;
    }
    const auto f = fit_gaussian(pts);
    ASSERT_TRUE(f.converged);
    pc.push_back((f.center - c) / f.center_error());
    ps.push_back((f.sigma - s) / f.sigma_error());
  }
  for (const auto* v : {&pc, &ps}) {
    double m = 0.0, m2 = 0.0;
    for (double x : *v) m += x;
    m /= v->size();
    for (double x : *v) m2 += (x - m) * (x - m);
    const double sd = std::sqrt(m2 / (v->size() - 1));
    EXPECT_NEAR(m, 0.0, 0.2);
    EXPECT_NEAR(sd, 1.0, 0.15);
  }
}

TEST(Fit, Errors) {
  EXPECT_THROW(fit_gaussian(gaussian_points(1, 0, 1, 0, -3, 3, 4)), InputError);
  EXPECT_THROW(fit_gaussian(gaussian_points(0, 0, 1, 0.5, -3, 3, 10)), InputError);
}

TEST(Background, Annotate) {
  ScanResult s;
  s.n_ions = 3;
  s.shots = 10;
  s.detuning = {0.0, 1.0};
  s.p = {{0.1, 0.2, 0.3}, {0.4, 0.5, 0.6}};
  s.err = s.p;
  s.raw_p = s.p;
  const auto zero = annotate_background(s, {1}, 0.0);
  EXPECT_EQ(zero.p, s.p);
  const auto a = annotate_background(s, {1}, 0.08);
  EXPECT_NEAR(a.p[0][1], 0.28, 1e-15);
  EXPECT_EQ(a.p[0][0], 0.1);
  EXPECT_EQ(a.p[0][2], 0.3);
  EXPECT_EQ(a.raw_p, s.p);
  ASSERT_EQ(a.corrections.size(), 1u);
  EXPECT_EQ(a.corrections[0].ion, 1u);
  const auto all = strip_corrections(annotate_background(s, {0, 1, 2}, 0.08));
  for (std::size_t k = 0; k < 2; ++k) {
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(all.p[k][i], s.p[k][i], 1e-15);
  }
  EXPECT_THROW(annotate_background(s, {3}, 0.08), InputError);
  EXPECT_THROW(annotate_background(s, {0}, 1.5), InputError);
}

TEST(Separation, Basics) {
  FitResult a, b;
  a.converged = b.converged = true;
  a.center = 2.80e6;
  b.center = -2.80e6;
  EXPECT_NEAR(separation(a, b), 5.60e6, 1e-6);
  EXPECT_EQ(separation(a, a), 0.0);
  b.converged = false;
  EXPECT_THROW(separation(a, b), InputError);
}

TEST(Report, JsonKeys) {
  const auto f = fit_gaussian(gaussian_points(0.3, 2.1e6, 4.4e6, 0.02, -15e6, 15e6, 61));
  const auto j = nlohmann::json::parse(fit_report_json(f, {{1, 0.08}}));
  for (const char* k : {"amplitude", "center_hz", "sigma_hz", "offset", "converged", "iterations", "chi2"}) {
    EXPECT_TRUE(j.contains(k)) << k;
  }
  EXPECT_EQ(j["corrections"][0]["ion"], 1);
  EXPECT_EQ(j["corrections"][0]["value"], 0.08);
  EXPECT_FALSE(nlohmann::json::parse(fit_report_json(f)).contains("corrections"));
}
