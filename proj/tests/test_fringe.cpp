#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "geophase/errors.hpp"
#include "geophase/fringe.hpp"
#include "geophase/optics.hpp"
#include "geophase/phase.hpp"

using namespace geophase;

namespace {

std::vector<FringeSample> cosine(double c0, double c1, double chi, std::size_t n, double span = kTwoPi) {
  std::vector<FringeSample> s;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = span * i / n;
    s.push_back({d, c0 + c1 * std::cos(d - chi)});
  }
  return s;
}

double wrap(double a) { return std::arg(std::polar(1.0, a)); }

}  // namespace

TEST(Fringe, NoiselessRecovery) {
  for (double chi : {1.2, -2.9, 0.0, 3.1}) {
    const FringeFit f = fringe_fit(cosine(0.5, 0.4, chi, 64));
    EXPECT_LT(std::abs(wrap(f.chi - chi)), 1e-10) << chi;
    EXPECT_NEAR(f.contrast, 0.4, 1e-12);
    EXPECT_NEAR(f.offset, 0.5, 1e-12);
    EXPECT_LT(f.residual, 1e-12);
    EXPECT_TRUE(f.phase_defined);
  }
}

TEST(Fringe, ChiInPrincipalRange) {
  const FringeFit f = fringe_fit(cosine(0.5, 0.3, kPi, 32));
  EXPECT_GT(f.chi, -kPi);
  EXPECT_LE(f.chi, kPi);
}

TEST(Fringe, ConstantSamplesHaveNoPhase) {
  const FringeFit f = fringe_fit(cosine(0.7, 0.0, 0.0, 64));
  EXPECT_FALSE(f.phase_defined);
  EXPECT_LT(f.contrast, kContrastThreshold);
  EXPECT_NEAR(f.offset, 0.7, 1e-14);
}

TEST(Fringe, RejectsPoorSampling) {
  EXPECT_THROW(fringe_fit(cosine(0.5, 0.4, 1.0, 2)), DomainError);
  EXPECT_THROW(fringe_fit(cosine(0.5, 0.4, 1.0, 16, 3.0)), DomainError);
}

TEST(Fringe, UnevenSamplingStillExact) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> d(0.0, kTwoPi);
  std::vector<FringeSample> s;
  for (int i = 0; i < 20; ++i) {
    const double x = d(rng);
    s.push_back({x, 0.2 + 0.15 * std::cos(x + 0.8)});
  }
  s.push_back({0.0, 0.2 + 0.15 * std::cos(0.8)});
  s.push_back({6.2, 0.2 + 0.15 * std::cos(6.2 + 0.8)});
  const FringeFit f = fringe_fit(s);
  EXPECT_LT(std::abs(wrap(f.chi + 0.8)), 1e-10);
}

TEST(Fringe, NoiseCalibration) {
  std::mt19937_64 rng(20261016);
  std::normal_distribution<double> noise(0.0, 0.01);
  int good = 0;
  double mean_err = 0.0, mean_se = 0.0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    auto s = cosine(0.5, 0.4, 1.2, 64);
    for (FringeSample& x : s) x.power += noise(rng);
    const FringeFit f = fringe_fit(s, 0.01);
    const double err = std::abs(wrap(f.chi - 1.2));
    if (err < 0.01) ++good;
    mean_err += err * err;
    ASSERT_TRUE(f.chi_stderr.has_value());
    mean_se += *f.chi_stderr;
  }
  EXPECT_GE(good, 950);
  // the quoted standard error tracks the observed scatter
  EXPECT_NEAR(std::sqrt(mean_err / trials), mean_se / trials, 0.2 * mean_se / trials);
}

TEST(Fringe, RecoversOpticalReadout) {
  OpticsConfig c;
  c.w0_mm = 0.6;
  const InterferenceReadout r = interference_readout(geophase::Setup::uniform(c, 3, 0.5), c, default_delta_grid());
  std::vector<FringeSample> s;
  for (std::size_t i = 0; i < r.delta.size(); ++i) s.push_back({r.delta[i], r.power[i]});
  const FringeFit f = fringe_fit(s);
  EXPECT_LT(std::abs(wrap(f.chi - r.chi)), 1e-10);
  EXPECT_NEAR(2.0 * f.contrast, r.contrast, 1e-10);
  EXPECT_NEAR(f.offset, 0.5, 1e-12);
}
