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

#ifndef HEMI_FILTER_H_
#define HEMI_FILTER_H_

#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hemi::signal {

inline constexpr double kSampleRate = 250.0;

enum class Band { kDelta, kTheta, kAlpha, kBeta, kGamma };

inline constexpr Band kAllBands[] = {Band::kDelta, Band::kTheta, Band::kAlpha,
                                     Band::kBeta, Band::kGamma};

struct BandDefinition {
  std::string name;
  double low_hz = 0.0;
  double high_hz = 0.0;
};

// delta 1-4, theta 5-8, alpha 9-12, beta 13-30, gamma 31-45 Hz.
BandDefinition band_definition(Band band);
std::string_view band_name(Band band);
// delta, theta, alpha, beta, gamma; case-insensitive.
Band parse_band(std::string_view name);

// One second-order section, transposed direct form II:
//   y = b0 x + s1;  s1 = b1 x - a1 y + s2;  s2 = b2 x - a2 y.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

struct FilterSpec {
  BandDefinition band;
  double sample_rate = kSampleRate;
  int order = 4;           // band-pass order (number of poles)
  bool zero_phase = true;  // forward-backward application
  std::vector<Biquad> sections;
};

// Butterworth band-pass as a cascade of order/2 biquads. order must be even
// and >= 2; 0 < low < high < sample_rate / 2 or ValidationError.
//
// In zero-phase mode the analog bandwidth is widened so that the combined
// forward-backward response is -3 dB at the band edges (the single-pass
// magnitude there is 2^-1/4). Poles are checked to lie inside the unit
// circle.
FilterSpec design_bandpass(const BandDefinition& band,
                           double sample_rate = kSampleRate, int order = 4,
                           bool zero_phase = true);
FilterSpec design_bandpass(Band band, double sample_rate = kSampleRate,
                           int order = 4, bool zero_phase = true);

// Single-pass transfer function evaluated on the unit circle at `hz`.
std::complex<double> frequency_response(const FilterSpec& spec, double hz);
// |H| of the applied filter: single-pass, or |H|^2 for zero-phase specs.
double effective_gain(const FilterSpec& spec, double hz);

// Same-length filtered copy. Zero-phase specs run forward then backward over
// a signal extended at both ends by odd reflection of 3 * order samples,
// with each pass starting from the steady-state response to its first
// sample. Non-finite input throws NumericError.
std::vector<double> apply_filter(std::span<const double> signal,
                                 const FilterSpec& spec);

}  // namespace hemi::signal

#endif  // HEMI_FILTER_H_
