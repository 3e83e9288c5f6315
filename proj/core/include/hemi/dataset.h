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

#ifndef HEMI_DATASET_H_
#define HEMI_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hemi/filter.h"
#include "hemi/recording.h"

namespace hemi::signal {

struct ExampleMeta {
  Dataset dataset = Dataset::kMonaLisa;
  int participant = 0;
  double intensity = 0.0;
  std::string channel;
  Band band = Band::kDelta;

  bool operator==(const ExampleMeta&) const = default;
};

// One filtered channel and its hemisphere label (0 left, 1 right).
struct LabeledExample {
  std::vector<double> features;
  int label = 0;
  ExampleMeta meta;

  bool operator==(const LabeledExample&) const = default;
};

struct DatasetOptions {
  int filter_order = 4;
  bool zero_phase = true;
  bool standardize = false;  // z-score each example after filtering
};

// One example per (recording, channel), in recording then channel order.
// Filter and label failures are rethrown with the recording and channel
// named.
std::vector<LabeledExample> build_dataset(
    const std::vector<RawRecording>& recordings, Band band,
    const DatasetOptions& options = {});

struct SplitSizes {
  std::size_t train = 0;
  std::size_t val = 0;
  std::size_t test = 0;
};

// 70/15/15 of n by largest remainder; equal remainders go to train, then
// val, then test.
SplitSizes split_sizes(std::size_t n);

struct SplitDataset {
  std::vector<LabeledExample> train;
  std::vector<LabeledExample> val;
  std::vector<LabeledExample> test;
  std::uint64_t seed = 0;
};

// Seeded, label-stratified split with split_sizes() totals. Each split's
// total is shared between the classes in proportion to what is still
// unassigned. Needs at least 10 examples.
SplitDataset split_dataset(std::vector<LabeledExample> examples,
                           std::uint64_t seed);

// Split directory: train.csv, val.csv, test.csv with one example per line,
//   label,dataset,participant,intensity,channel,band,v1,...,vN
void save_split(const SplitDataset& split, const std::filesystem::path& dir);
SplitDataset load_split(const std::filesystem::path& dir);

}  // namespace hemi::signal

#endif  // HEMI_DATASET_H_
