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

#include "hemi/synthetic.h"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "hemi/error.h"
#include "hemi/random.h"

namespace hemi::signal {
namespace {

// Paul Kellet's refined pink-noise filter; unit-ish variance after the 0.11
// output scale.
class PinkNoise {
 public:
  double next(double white) {
    b_[0] = 0.99886 * b_[0] + white * 0.0555179;
    b_[1] = 0.99332 * b_[1] + white * 0.0750759;
    b_[2] = 0.96900 * b_[2] + white * 0.1538520;
    b_[3] = 0.86650 * b_[3] + white * 0.3104856;
    b_[4] = 0.55000 * b_[4] + white * 0.5329522;
    b_[5] = -0.7616 * b_[5] - white * 0.0168980;
    const double pink =
        b_[0] + b_[1] + b_[2] + b_[3] + b_[4] + b_[5] + b_[6] + white * 0.5362;
    b_[6] = white * 0.115926;
    return pink * 0.11;
  }

 private:
  double b_[7] = {};
};

void check_gains(const BandGains& gains, const char* side) {
  for (double g : gains) {
    if (!(g >= 0.0) || !std::isfinite(g)) {
      throw ValidationError(std::string(side) +
                            " band gains must be finite and >= 0");
    }
  }
}

std::vector<double> synth_channel(const SyntheticConfig& config,
                                  const BandGains& gains,
                                  std::mt19937_64& rng) {
  std::normal_distribution<double> white(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t n = config.length;
  std::vector<double> x(n);
  PinkNoise pink;
  for (double& v : x) v = config.noise_amplitude * pink.next(white(rng));

  const double two_pi = 2.0 * std::numbers::pi;
  for (Band band : kAllBands) {
    const BandDefinition def = band_definition(band);
    const double base =
        config.band_amplitude * std::sqrt(gains[static_cast<int>(band)]);
    for (std::size_t k = 0; k < config.sinusoids_per_band; ++k) {
      const double slot = (def.high_hz - def.low_hz) /
                          static_cast<double>(config.sinusoids_per_band);
      const double offset = 0.5 + config.frequency_spread * (unit(rng) - 0.5);
      const double hz = def.low_hz + slot * (static_cast<double>(k) + offset);
      const double phase = two_pi * unit(rng);
      const double amp = base * (1.0 + config.jitter * (2.0 * unit(rng) - 1.0));
      const double w = two_pi * hz / config.sample_rate;
      for (std::size_t t = 0; t < n; ++t) {
        x[t] += amp * std::sin(w * static_cast<double>(t) + phase);
      }
    }
  }
  return x;
}

}  // namespace

void SyntheticConfig::validate() const {
  check_gains(left_gain, "left");
  check_gains(right_gain, "right");
  if (!(noise_amplitude >= 0.0) || !(band_amplitude >= 0.0)) {
    throw ValidationError("noise and band amplitudes must be >= 0");
  }
  if (!(jitter >= 0.0 && jitter < 1.0)) {
    throw ValidationError("jitter must lie in [0, 1)");
  }
  if (!(frequency_spread >= 0.0 && frequency_spread <= 1.0)) {
    throw ValidationError("frequency spread must lie in [0, 1]");
  }
  if (sinusoids_per_band < 1) {
    throw ValidationError("sinusoids_per_band must be >= 1");
  }
  if (length < 16) throw ValidationError("synthetic length must be >= 16");
  if (!(sample_rate > 2.0 * band_definition(Band::kGamma).high_hz)) {
    throw ValidationError("sample rate must exceed twice the gamma upper edge");
  }
  if (datasets.empty()) throw ValidationError("no datasets requested");
}

std::vector<RawRecording> generate_synthetic(const SyntheticConfig& config,
                                             int n_participants,
                                             int n_intensities) {
  config.validate();
  if (n_participants < 1 || n_intensities < 1) {
    throw ValidationError("participant and intensity counts must be >= 1");
  }
  const auto& labels = channel_labels();
  std::vector<RawRecording> out;
  for (Dataset dataset : config.datasets) {
    for (int p = 1; p <= n_participants; ++p) {
      for (int i = 1; i <= n_intensities; ++i) {
        RawRecording r;
        r.dataset = dataset;
        r.participant = p;
        r.intensity = i / 10.0;
        r.sample_rate = config.sample_rate;
        const std::string key = std::string(dataset_name(dataset)) + "/" +
                                std::to_string(p) + "/" + std::to_string(i);
        std::mt19937_64 rng(derive_seed(config.seed, key));
        for (std::string_view label : labels) {
          const BandGains& gains =
              label_channel(label) == 0 ? config.left_gain : config.right_gain;
          r.channel_labels.emplace_back(label);
          r.samples.push_back(synth_channel(config, gains, rng));
        }
        out.push_back(std::move(r));
      }
    }
  }
  return out;
}

}  // namespace hemi::signal
