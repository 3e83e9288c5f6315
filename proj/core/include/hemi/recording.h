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

#ifndef HEMI_RECORDING_H_
#define HEMI_RECORDING_H_

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hemi/filter.h"

namespace hemi::signal {

inline constexpr std::size_t kNumChannels = 31;
inline constexpr std::size_t kSamplesPerChannel = 15000;

enum class Dataset { kMonaLisa, kNeckerCube };
inline constexpr Dataset kAllDatasets[] = {Dataset::kMonaLisa,
                                           Dataset::kNeckerCube};

// "MonaLisa" / "NeckerCube".
std::string_view dataset_name(Dataset dataset);
// Accepts MonaLisa, NeckerCube and the short forms mona / monalisa / necker
// (case-insensitive).
Dataset parse_dataset(std::string_view name);
// "mona" / "necker"; used in report rows.
std::string_view dataset_short_name(Dataset dataset);

enum class Hemisphere { kLeft = 0, kRight = 1 };

// The 31 referenced electrode labels in acquisition order.
const std::array<std::string_view, kNumChannels>& channel_labels();

// "-A1" -> 0 (left), "-A2" -> 1 (right); anything else throws
// UnknownChannelError.
int label_channel(std::string_view label);

// One stimulus presentation: 31 channels sampled at 250 Hz.
struct RawRecording {
  Dataset dataset = Dataset::kMonaLisa;
  int participant = 1;
  double intensity = 0.1;
  double sample_rate = kSampleRate;
  std::vector<std::string> channel_labels;
  std::vector<std::vector<double>> samples;  // channel-major

  std::size_t length() const { return samples.empty() ? 0 : samples[0].size(); }

  // Exactly 31 channels, every label ending in -A1/-A2, every channel of
  // `expected_length` samples. Throws FormatError naming `source`.
  void validate(std::size_t expected_length = kSamplesPerChannel,
                std::string_view source = "recording") const;

  bool operator==(const RawRecording&) const = default;
};

// Recording file format (text, one recording per file):
//   # dataset=<MonaLisa|NeckerCube> participant=<int> intensity=<x> rate=250
//   <label>,v1,...,vN        (31 lines)
// Values are written in shortest round-trip decimal form.
void save_recording(const RawRecording& recording,
                    const std::filesystem::path& path);
RawRecording load_recording(const std::filesystem::path& path,
                            std::size_t expected_length = kSamplesPerChannel);

// <dir>/<Dataset>_p<NN>_i<NN>.txt for each recording. Creates the directory.
void save_recordings(const std::vector<RawRecording>& recordings,
                     const std::filesystem::path& dir);
// Every *.txt file in `dir`, sorted by file name.
std::vector<RawRecording> load_recordings(
    const std::filesystem::path& dir,
    std::size_t expected_length = kSamplesPerChannel);

std::string recording_file_name(const RawRecording& recording);

}  // namespace hemi::signal

#endif  // HEMI_RECORDING_H_
