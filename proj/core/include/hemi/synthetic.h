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

#ifndef HEMI_SYNTHETIC_H_
#define HEMI_SYNTHETIC_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "hemi/recording.h"

namespace hemi::signal {

// Band gains are power multipliers indexed by Band (delta..gamma).
using BandGains = std::array<double, 5>;

struct SyntheticConfig {
  std::uint64_t seed = 0;
  BandGains left_gain = {1.0, 1.0, 1.0, 2.0, 1.0};
  BandGains right_gain = {1.0, 1.0, 1.0, 1.0, 1.0};
  double noise_amplitude = 1.0;  // pink-noise standard deviation (approx.)
  double band_amplitude = 1.0;   // per-sinusoid amplitude at gain 1
  double jitter = 0.1;           // relative amplitude jitter, in [0, 1)
  std::size_t sinusoids_per_band = 3;
  // Sinusoid k of a band sits at the centre of the k-th of
  // `sinusoids_per_band` equal slots across the band. A spread of s moves it
  // uniformly by up to s/2 slot widths either way; 1 covers the whole slot.
  double frequency_spread = 0.0;
  std::size_t length = kSamplesPerChannel;
  double sample_rate = kSampleRate;
  std::vector<Dataset> datasets = {Dataset::kMonaLisa, Dataset::kNeckerCube};

  // Throws ValidationError for negative gains or amplitudes, jitter outside
  // [0, 1), a frequency spread outside [0, 1], fewer than 16 samples or an
  // empty dataset list.
  void validate() const;
  // True when some band gain differs between the hemispheres.
  bool separable() const { return left_gain != right_gain; }
};

// One recording per (dataset, participant 1..n_participants, intensity
// 0.1..n_intensities/10). Each channel is pink noise plus, for every band,
// `sinusoids_per_band` in-band sinusoids with random phases whose power
// follows its hemisphere's gain. Every recording draws from its
// own stream derived from the seed and the recording's identity, so
// recordings do not depend on which others are generated.
std::vector<RawRecording> generate_synthetic(const SyntheticConfig& config,
                                             int n_participants,
                                             int n_intensities);

}  // namespace hemi::signal

#endif  // HEMI_SYNTHETIC_H_
