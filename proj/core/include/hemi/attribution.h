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

#ifndef HEMI_ATTRIBUTION_H_
#define HEMI_ATTRIBUTION_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace hemi::attribution {

// Model output for a batch of rows laid out back to back, each of
// `row_len` values. Returns one value per row.
using ValueFn = std::function<std::vector<double>(std::span<const double> rows,
                                                  std::size_t row_len)>;

inline constexpr std::size_t kMaxExactPlayers = 12;

struct AttributionConfig {
  std::vector<std::vector<double>> background;
  std::size_t n_permutations = 1000;
  std::uint64_t seed = 0;
  // Contiguous features that are switched together. The last segment may be
  // shorter.
  std::size_t segment_size = 1;

  // Non-empty background whose rows all have n_features values,
  // n_permutations >= 1, segment_size >= 1.
  void validate(std::size_t n_features) const;
};

struct AttributionResult {
  std::vector<double> phi;        // one per segment
  std::vector<double> std_error;  // sampled estimates only; zeros when exact
  double base_value = 0.0;        // mean model output over the background
  double explained_output = 0.0;  // model output at the instance
  std::size_t segment_size = 1;
  std::size_t n_features = 0;

  // Index of the first raw feature of segment j.
  std::size_t feature_index(std::size_t j) const { return j * segment_size; }
};

// Exact Shapley values by enumerating all 2^d coalitions of the d segments.
// Features outside a coalition take background values and the output is
// averaged over the background. Refuses d > 12 with a ValidationError.
AttributionResult exact_shapley(const ValueFn& f,
                                std::span<const double> instance,
                                const AttributionConfig& config);

// Permutation-sampling estimate. Each permutation draws one background row
// and switches segments to the instance in permuted order, crediting each
// segment with the change in output. Deterministic for a seed.
AttributionResult sampled_shapley(const ValueFn& f,
                                  std::span<const double> instance,
                                  const AttributionConfig& config);

struct TopImpact {
  std::size_t feature_index = 0;
  bool positive = true;  // a zero contribution counts as positive
  double time_seconds = 0.0;

  std::string sign() const { return positive ? "+ve" : "-ve"; }
};

// Largest |phi| (lowest index on ties); time is feature_index / sample_rate.
// Throws ValidationError for an empty result.
TopImpact top_impact(const AttributionResult& result,
                     double sample_rate = 250.0);

struct FeatureSummary {
  std::size_t feature_index = 0;
  double time_s = 0.0;
  double phi_mean = 0.0;
  double phi_abs_mean = 0.0;

  bool operator==(const FeatureSummary&) const = default;
};

// Per-segment signed and absolute means over the results, ordered by
// phi_abs_mean descending then feature index. Results must agree in
// segment count and size (DimensionError otherwise).
std::vector<FeatureSummary> summarize(std::span<const AttributionResult> results,
                                      double sample_rate = 250.0);

// "feature_index,time_s,phi_mean,phi_abs_mean" header plus one line per row.
std::string summary_text(std::span<const FeatureSummary> rows);

}  // namespace hemi::attribution

#endif  // HEMI_ATTRIBUTION_H_
