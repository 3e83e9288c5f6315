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

#include "hemi/dataset.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "hemi/error.h"

namespace hemi::signal {
namespace {

template <typename E>
[[noreturn]] void rethrow_with_context(const E& e, const RawRecording& r,
                                       const std::string& channel) {
  throw E(std::string(dataset_name(r.dataset)) + " participant " +
          std::to_string(r.participant) + " intensity " +
          std::to_string(r.intensity) + " channel " + channel + ": " +
          e.what());
}

void standardize(std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / n);
  for (double& v : x) v = sd > 0.0 ? (v - mean) / sd : 0.0;
}

// Largest-remainder apportionment of `total` across `weights`; equal
// remainders favour lower indices.
std::vector<std::size_t> apportion(std::size_t total,
                                   const std::vector<std::size_t>& weights) {
  const std::size_t sum = std::accumulate(weights.begin(), weights.end(),
                                          std::size_t{0});
  std::vector<std::size_t> out(weights.size(), 0);
  if (sum == 0) return out;
  std::vector<std::size_t> rem(weights.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const std::uint64_t q = static_cast<std::uint64_t>(total) * weights[i];
    out[i] = static_cast<std::size_t>(q / sum);
    rem[i] = static_cast<std::size_t>(q % sum);
    assigned += out[i];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++out[order[k]];
  return out;
}

void append_double(std::string& out, double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, end);
}

void save_examples(const std::vector<LabeledExample>& examples,
                   std::uint64_t seed, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "# seed=" << seed << '\n';
  std::string line;
  for (const LabeledExample& e : examples) {
    line.clear();
    line += std::to_string(e.label);
    line += ',';
    line += dataset_name(e.meta.dataset);
    line += ',' + std::to_string(e.meta.participant) + ',';
    append_double(line, e.meta.intensity);
    line += ',' + e.meta.channel + ',';
    line += band_name(e.meta.band);
    for (double v : e.features) {
      line += ',';
      append_double(line, v);
    }
    line += '\n';
    out << line;
  }
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<LabeledExample> load_examples(const std::filesystem::path& path,
                                          std::uint64_t& seed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<LabeledExample> out;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    return FormatError(path.string() + ":" + std::to_string(line_no) + ": " +
                       what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("# seed=", 0) == 0) {
      const char* first = line.data() + 7;
      auto [p, ec] = std::from_chars(first, line.data() + line.size(), seed);
      if (ec != std::errc()) throw fail("bad seed");
      continue;
    }
    std::vector<std::string_view> cells;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      cells.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cells.size() < 7) throw fail("expected label, metadata and features");
    LabeledExample e;
    try {
      if (cells[0] != "0" && cells[0] != "1") throw fail("label must be 0 or 1");
      e.label = cells[0] == "1" ? 1 : 0;
      e.meta.dataset = parse_dataset(cells[1]);
      auto [p1, ec1] = std::from_chars(cells[2].data(),
                                       cells[2].data() + cells[2].size(),
                                       e.meta.participant);
      auto [p2, ec2] = std::from_chars(cells[3].data(),
                                       cells[3].data() + cells[3].size(),
                                       e.meta.intensity);
      if (ec1 != std::errc() || ec2 != std::errc()) {
        throw fail("bad participant or intensity");
      }
      e.meta.channel = std::string(cells[4]);
      e.meta.band = parse_band(cells[5]);
    } catch (const ValidationError& err) {
      throw fail(err.what());
    }
    e.features.reserve(cells.size() - 6);
    for (std::size_t i = 6; i < cells.size(); ++i) {
      double v = 0.0;
      auto [p, ec] = std::from_chars(cells[i].data(),
                                     cells[i].data() + cells[i].size(), v);
      if (ec != std::errc() || p != cells[i].data() + cells[i].size()) {
        throw fail("bad feature value '" + std::string(cells[i]) + "'");
      }
      e.features.push_back(v);
    }
    if (!out.empty() && out.front().features.size() != e.features.size()) {
      throw fail("feature count differs from the first example");
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace

std::vector<LabeledExample> build_dataset(
    const std::vector<RawRecording>& recordings, Band band,
    const DatasetOptions& options) {
  std::vector<LabeledExample> out;
  if (recordings.empty()) return out;
  const FilterSpec base = design_bandpass(band, recordings.front().sample_rate,
                                          options.filter_order,
                                          options.zero_phase);
  out.reserve(recordings.size() * kNumChannels);
  for (const RawRecording& r : recordings) {
    const FilterSpec spec =
        r.sample_rate == base.sample_rate
            ? base
            : design_bandpass(band, r.sample_rate, options.filter_order,
                              options.zero_phase);
    if (r.channel_labels.size() != r.samples.size()) {
      throw FormatError(std::string(dataset_name(r.dataset)) + " participant " +
                        std::to_string(r.participant) +
                        ": channel labels and sample rows differ in count");
    }
    for (std::size_t c = 0; c < r.samples.size(); ++c) {
      const std::string& label = r.channel_labels[c];
      LabeledExample e;
      try {
        e.label = label_channel(label);
        e.features = apply_filter(r.samples[c], spec);
      } catch (const UnknownChannelError& err) {
        rethrow_with_context(err, r, label);
      } catch (const NumericError& err) {
        rethrow_with_context(err, r, label);
      }
      if (options.standardize) standardize(e.features);
      e.meta = {r.dataset, r.participant, r.intensity, label, band};
      out.push_back(std::move(e));
    }
  }
  return out;
}

SplitSizes split_sizes(std::size_t n) {
  // Quotas in twentieths: 14n, 3n, 3n.
  const std::array<std::size_t, 3> quota = {14 * n, 3 * n, 3 * n};
  std::array<std::size_t, 3> size{}, rem{};
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    size[i] = quota[i] / 20;
    rem[i] = quota[i] % 20;
    assigned += size[i];
  }
  std::array<int, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return rem[a] > rem[b]; });
  for (int k = 0; assigned < n; ++k, ++assigned) ++size[order[k]];
  return {size[0], size[1], size[2]};
}

SplitDataset split_dataset(std::vector<LabeledExample> examples,
                           std::uint64_t seed) {
  const std::size_t n = examples.size();
  if (n < 10) {
    throw ValidationError("splitting needs at least 10 examples, got " +
                          std::to_string(n));
  }
  std::mt19937_64 rng(seed);
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < n; ++i) {
    const int y = examples[i].label;
    if (y != 0 && y != 1) throw ValidationError("labels must be 0 or 1");
    by_class[static_cast<std::size_t>(y)].push_back(i);
  }
  for (auto& idx : by_class) std::shuffle(idx.begin(), idx.end(), rng);

  const SplitSizes sizes = split_sizes(n);
  std::vector<std::size_t> remaining = {by_class[0].size(), by_class[1].size()};
  const auto train_c = apportion(sizes.train, remaining);
  for (int c = 0; c < 2; ++c) remaining[c] -= train_c[c];
  const auto val_c = apportion(sizes.val, remaining);

  SplitDataset split;
  split.seed = seed;
  for (std::size_t c = 0; c < 2; ++c) {
    const auto& idx = by_class[c];
    for (std::size_t k = 0; k < idx.size(); ++k) {
      auto& dst = k < train_c[c]                ? split.train
                  : k < train_c[c] + val_c[c] ? split.val
                                                : split.test;
      dst.push_back(std::move(examples[idx[k]]));
    }
  }
  std::shuffle(split.train.begin(), split.train.end(), rng);
  std::shuffle(split.val.begin(), split.val.end(), rng);
  std::shuffle(split.test.begin(), split.test.end(), rng);
  return split;
}

void save_split(const SplitDataset& split, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string());
  save_examples(split.train, split.seed, dir / "train.csv");
  save_examples(split.val, split.seed, dir / "val.csv");
  save_examples(split.test, split.seed, dir / "test.csv");
}

SplitDataset load_split(const std::filesystem::path& dir) {
  SplitDataset split;
  split.train = load_examples(dir / "train.csv", split.seed);
  split.val = load_examples(dir / "val.csv", split.seed);
  split.test = load_examples(dir / "test.csv", split.seed);
  return split;
}

}  // namespace hemi::signal
