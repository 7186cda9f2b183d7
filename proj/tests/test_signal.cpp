#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gap_predict/signal.hpp"
#include "test_support.hpp"

using namespace gap_predict;
using testing_support::Gen;

namespace {

constexpr double kBumpMass = 0.443993816168079437823;  // integral of the unit bump on [-1, 1]

// (1/pi) int X(i w) Re[(i w)^{-k} exp(i w t)] dw over w > 0, by Boost.
double bump_oracle(const SpectrumSpec& spec, int k, double t) {
  double total = 0.0;
  for (const auto& b : spec.bump_list()) {
    auto f = [&](double w) {
      const std::complex<double> z(0.0, w);
      const auto kernel = std::pow(z, -k) * std::exp(z * t);
      return b.amplitude * bump_profile((w - b.center) / b.half_width) * kernel.real();
    };
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, b.center - b.half_width, b.center + b.half_width, 15, 1e-13);
  }
  return total / std::numbers::pi;
}

SpectrumSpec random_tones(Gen& g, double gap) {
  std::vector<Tone> tones;
  const int n = g.integer(1, 4);
  for (int i = 0; i < n; ++i) {
    tones.push_back({g.uniform(gap, 6.0 * gap), {g.uniform(-1.0, 1.0), g.uniform(-1.0, 1.0)}});
  }
  return SpectrumSpec::tones(gap, tones);
}

SpectrumSpec random_bumps(Gen& g, double gap) {
  std::vector<Bump> bumps;
  const int n = g.integer(1, 3);
  for (int i = 0; i < n; ++i) {
    const double hw = g.uniform(0.2, 3.0);
    bumps.push_back({gap + hw + g.uniform(0.0, 4.0), hw, g.uniform(-1.0, 2.0)});
  }
  return SpectrumSpec::bumps(gap, bumps);
}

}  // namespace

TEST(Spectrum, RejectsInGapContent) {
  EXPECT_THROW(SpectrumSpec::tones(1.0, {{0.5, {1.0, 0.0}}}), ValidationError);
  EXPECT_THROW(SpectrumSpec::tones(1.0, {{-0.9, {1.0, 0.0}}}), ValidationError);
  EXPECT_THROW(SpectrumSpec::bumps(1.0, {{1.5, 1.0, 1.0}}), ValidationError);
  EXPECT_THROW(SpectrumSpec::bumps(1.0, {{3.0, 0.0, 1.0}}), ValidationError);
  EXPECT_THROW(SpectrumSpec::tones(0.0, {}), ValidationError);
  EXPECT_NO_THROW(SpectrumSpec::tones(1.0, {{1.0, {1.0, 0.0}}}));
  EXPECT_NO_THROW(SpectrumSpec::bumps(1.0, {{2.0, 1.0, 1.0}}));
}

TEST(Spectrum, NegativeFrequencyToneFoldsToConjugate) {
  const auto a = SpectrumSpec::tones(1.0, {{-2.0, {0.3, 0.7}}});
  const auto b = SpectrumSpec::tones(1.0, {{2.0, {0.3, -0.7}}});
  for (double t : {-3.0, 0.0, 0.4, 11.0}) EXPECT_DOUBLE_EQ(sample(a, t), sample(b, t));
}

TEST(Spectrum, ToneSamplesAreClosedForm) {
  const auto s = SpectrumSpec::tones(1.0, {{2.0, {0.5, 0.0}}, {3.5, {0.0, 1.0}}});
  for (double t : {-1.0, 0.0, 0.25, 7.0}) {
    EXPECT_NEAR(sample(s, t), 0.5 * std::cos(2.0 * t) - std::sin(3.5 * t), 1e-15);
  }
}

TEST(Spectrum, ZeroSignal) {
  const auto s = SpectrumSpec::tones(1.0, {});
  EXPECT_TRUE(s.empty());
  EXPECT_EQ(sample(s, 3.0), 0.0);
  EXPECT_EQ(exact_hk(s, 4, 3.0), 0.0);
  EXPECT_EQ(l1_budget(s), 0.0);
  EXPECT_THROW(normalized_l1(s), ValidationError);
}

TEST(Spectrum, BumpSamplesMatchBoostOracle) {
  const auto s = SpectrumSpec::bumps(1.0, {{3.0, 1.5, 0.8}, {6.0, 2.0, -0.4}});
  for (double t : {-4.0, -0.3, 0.0, 1.7, 9.0}) {
    EXPECT_NEAR(sample(s, t), bump_oracle(s, 0, t), 2e-10) << t;
  }
}

TEST(Spectrum, IteratedIntegralsMatchBoostOracle) {
  const auto s = SpectrumSpec::bumps(1.0, {{3.0, 1.5, 0.8}});
  for (int k = 1; k <= 6; ++k) {
    for (double t : {-2.0, 0.0, 3.3}) {
      EXPECT_NEAR(exact_hk(s, k, t), bump_oracle(s, k, t), 2e-10) << "k=" << k << " t=" << t;
    }
  }
}

TEST(SpectrumProperty, IteratedIntegralsDifferentiateDownward) {
  Gen g(41);
  const double delta = 1e-4;
  for (int trial = 0; trial < 40; ++trial) {
    const auto s = trial % 2 == 0 ? random_tones(g, 1.0) : random_bumps(g, 1.0);
    const int k = g.integer(1, 5);
    const double t = g.uniform(-10.0, 10.0);
    const double lower = k == 1 ? sample(s, t) : exact_hk(s, k - 1, t);
    const double derivative = (exact_hk(s, k, t + delta) - exact_hk(s, k, t - delta)) / (2.0 * delta);
    EXPECT_NEAR(derivative, lower, 1e-6 * (1.0 + std::abs(lower)));
  }
}

TEST(Spectrum, L1BudgetAndNormalization) {
  const auto tones = SpectrumSpec::tones(1.0, {{2.0, {3.0, 4.0}}, {5.0, {-1.0, 0.0}}});
  EXPECT_DOUBLE_EQ(l1_budget(tones), 12.0);
  const auto bumps = SpectrumSpec::bumps(1.0, {{4.0, 2.0, -1.5}});
  EXPECT_NEAR(l1_budget(bumps), 2.0 * 1.5 * 2.0 * kBumpMass, 1e-12);
  EXPECT_NEAR(l1_budget(normalized_l1(bumps)), 1.0, 1e-12);
  EXPECT_NEAR(l1_budget(normalized_l1(tones)), 1.0, 1e-15);
}

TEST(Spectrum, Epsilon1ToneClosedForm) {
  const auto s = SpectrumSpec::tones(1.0, {{1.0, {1.0, 0.0}}});
  EXPECT_NEAR(epsilon1(s, TaperSpec(TaperFamily::Gaussian, 1.0)), 2.0 * (1.0 - std::exp(-1.0)),
              1e-12);
}

TEST(Spectrum, Epsilon1BumpMatchesBoost) {
  const auto s = SpectrumSpec::bumps(1.0, {{3.0, 1.5, 0.8}});
  const TaperSpec r(TaperFamily::Lorentzian, 0.4);
  auto f = [&](double w) { return (1.0 - r(w)) * 0.8 * bump_profile((w - 3.0) / 1.5); };
  const double oracle =
      2.0 * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 1.5, 4.5, 15, 1e-13);
  EXPECT_NEAR(epsilon1(s, r), oracle, 1e-11);
}

TEST(SpectrumProperty, Epsilon1IsMonotoneInScale) {
  Gen g(42);
  const TaperFamily families[] = {TaperFamily::Gaussian, TaperFamily::Exponential,
                                  TaperFamily::Lorentzian};
  for (int trial = 0; trial < 30; ++trial) {
    const auto s = trial % 2 == 0 ? random_tones(g, 1.0) : random_bumps(g, 1.0);
    const auto f = families[g.integer(0, 2)];
    double prev = 0.0;
    for (double nu = 0.01; nu <= 1.0; nu *= 1.5) {
      const double e = epsilon1(s, TaperSpec(f, nu));
      EXPECT_GE(e, prev - 1e-12);
      EXPECT_LE(e, l1_budget(s) + 1e-12);
      prev = e;
    }
  }
}

TEST(SpectrumProperty, SelectNuInvertsEpsilon1) {
  Gen g(43);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = normalized_l1(trial % 2 == 0 ? random_tones(g, 1.0) : random_bumps(g, 1.0));
    const auto f = trial % 3 == 0 ? TaperFamily::Exponential : TaperFamily::Gaussian;
    const double target = g.log_uniform(1e-3, 0.3);
    const double nu = select_nu(s, f, target);
    EXPECT_LE(epsilon1(s, TaperSpec(f, nu)), target);
    if (nu < 1.0) {
      EXPECT_GT(epsilon1(s, TaperSpec(f, std::min(1.0, nu * (1.0 + 1e-3)))), target);
    }
  }
}

TEST(Spectrum, SelectNuReturnsOneWhenTargetIsLoose) {
  const auto s = SpectrumSpec::tones(1.0, {{2.0, {0.5, 0.0}}});
  EXPECT_EQ(select_nu(s, TaperFamily::Gaussian, 10.0), 1.0);
  EXPECT_THROW(select_nu(s, TaperFamily::Gaussian, 0.0), ValidationError);
}

TEST(Spectrum, MergeAndScale) {
  const auto a = SpectrumSpec::tones(1.0, {{2.0, {1.0, 0.0}}});
  const auto b = SpectrumSpec::tones(1.5, {{3.0, {0.0, 1.0}}});
  const auto m = merged(a, b);
  EXPECT_EQ(m.omega_gap(), 1.0);
  EXPECT_NEAR(sample(m, 0.7), sample(a, 0.7) + sample(b, 0.7), 1e-15);
  EXPECT_NEAR(sample(scaled(a, -2.0), 0.7), -2.0 * sample(a, 0.7), 1e-15);
  EXPECT_THROW(merged(a, SpectrumSpec::bumps(1.0, {})), ValidationError);
}
