/* Copyright 2026 The Hemi Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "hemi/filter.h"

#include <cmath>
#include <complex>
#include <random>

#include <gtest/gtest.h>

#include "hemi/error.h"
#include "oracles.h"

namespace hemi::signal {
namespace {

constexpr std::size_t kLength = 15000;

double power(std::span<const double> x) {
  double s = 0.0;
  for (double v : testing::power_spectrum(x)) s += v;
  return s;
}

double retained(double hz, Band band) {
  const auto x = testing::sinusoid(kLength, hz, kSampleRate);
  const auto y = apply_filter(x, design_bandpass(band));
  return power(y) / power(x);
}

TEST(FilterTest, BandDefinitions) {
  EXPECT_EQ(band_definition(Band::kAlpha).low_hz, 9.0);
  EXPECT_EQ(band_definition(Band::kBeta).high_hz, 30.0);
  EXPECT_EQ(band_definition(Band::kGamma).low_hz, 31.0);
  EXPECT_EQ(parse_band("Beta"), Band::kBeta);
  EXPECT_THROW(parse_band("mu"), ValidationError);
}

TEST(FilterTest, AlphaMagnitudeResponse) {
  const FilterSpec spec = design_bandpass(Band::kAlpha);
  EXPECT_GE(effective_gain(spec, 10.5), 0.9);
  EXPECT_LE(effective_gain(spec, 40.0), 0.01);
  EXPECT_EQ(spec.sections.size(), 2u);
}

TEST(FilterTest, DeltaKillsDc) {
  EXPECT_EQ(std::abs(frequency_response(design_bandpass(Band::kDelta), 0.0)), 0.0);
}

TEST(FilterTest, ZeroPhaseEdgesAreMinusThreeDb) {
  for (Band band : kAllBands) {
    const FilterSpec spec = design_bandpass(band);
    const BandDefinition def = band_definition(band);
    EXPECT_NEAR(effective_gain(spec, def.low_hz), std::sqrt(0.5), 1e-6) << def.name;
    EXPECT_NEAR(effective_gain(spec, def.high_hz), std::sqrt(0.5), 1e-6) << def.name;
  }
}

TEST(FilterTest, DesignErrors) {
  EXPECT_THROW(design_bandpass(Band::kGamma, 60.0), ValidationError);
  EXPECT_THROW(design_bandpass(Band::kAlpha, 250.0, 3), ValidationError);
  EXPECT_THROW(design_bandpass(BandDefinition{"x", 10.0, 5.0}), ValidationError);
}

TEST(FilterTest, SinusoidBandPowerFromSpectrum) {
  EXPECT_GE(retained(10.0, Band::kAlpha), 0.9);
  EXPECT_LE(retained(10.0, Band::kGamma), 0.01);
  EXPECT_GE(retained(2.0, Band::kDelta), 0.9);
}

TEST(FilterTest, ZeroInZeroOut) {
  const std::vector<double> zeros(500, 0.0);
  for (double v : apply_filter(zeros, design_bandpass(Band::kBeta))) EXPECT_EQ(v, 0.0);
}

TEST(FilterTest, NonFiniteInput) {
  std::vector<double> x(100, 1.0);
  x[40] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(apply_filter(x, design_bandpass(Band::kBeta)), NumericError);
}

TEST(FilterTest, Linearity) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> x(3000), y(3000), mix(3000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = z(rng);
    y[i] = z(rng);
    mix[i] = 2.5 * x[i] - 0.75 * y[i];
  }
  const FilterSpec spec = design_bandpass(Band::kTheta);
  const auto fx = apply_filter(x, spec), fy = apply_filter(y, spec), fm = apply_filter(mix, spec);
  std::vector<double> combo(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) combo[i] = 2.5 * fx[i] - 0.75 * fy[i];
  EXPECT_LT(testing::relative_error(fm, combo), 1e-9);
}

TEST(FilterTest, ZeroPhasePreservesPhase) {
  const auto x = testing::sinusoid(2500, 20.0, kSampleRate, 1.0, 0.3);
  const auto y = apply_filter(x, design_bandpass(Band::kBeta));
  int best_lag = 99;
  double best = -1e300;
  for (int lag = -6; lag <= 6; ++lag) {
    double s = 0.0;
    for (int t = 500; t < 2000; ++t) s += x[t] * y[t + lag];
    if (s > best) best = s, best_lag = lag;
  }
  EXPECT_EQ(best_lag, 0);
}

TEST(FilterTest, BandsPartitionWhiteNoisePower) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> x(kLength);
  for (double& v : x) v = z(rng);
  double total = 0.0;
  for (Band band : kAllBands) total += power(apply_filter(x, design_bandpass(band)));
  const double ratio = total / testing::band_power(x, kSampleRate, 1.0, 45.0);
  EXPECT_GE(ratio, 0.9);
  EXPECT_LE(ratio, 1.05);
}

TEST(FilterTest, SinglePassMode) {
  const FilterSpec spec = design_bandpass(Band::kAlpha, kSampleRate, 4, false);
  EXPECT_NEAR(effective_gain(spec, 9.0), std::sqrt(0.5), 1e-6);
  const auto x = testing::sinusoid(kLength, 10.5, kSampleRate);
  EXPECT_EQ(apply_filter(x, spec).size(), x.size());
}

}  // namespace
}  // namespace hemi::signal
