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

#ifndef HEMI_METRICS_H_
#define HEMI_METRICS_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace hemi::metrics {

// Positive class is 1 (right hemisphere).
struct ConfusionCounts {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  bool operator==(const ConfusionCounts&) const = default;
};

// Predicted class is 1 iff score >= threshold. Lengths must match and be
// >= 1 (DimensionError / ValidationError); labels must be 0 or 1.
ConfusionCounts confusion(std::span<const double> scores,
                          std::span<const int> labels, double threshold = 0.5);

// Ratios whose denominator is zero are reported as 0 and flagged.
struct MetricsReport {
  double precision = 0.0;
  double recall = 0.0;
  double specificity = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
  double roc_auc = 0.0;

  bool precision_degenerate = false;
  bool recall_degenerate = false;
  bool specificity_degenerate = false;
  bool f1_degenerate = false;
  bool roc_auc_degenerate = false;  // only one class present
  // Every prediction fell in one class.
  bool collapsed = false;

  bool degenerate() const {
    return precision_degenerate || recall_degenerate ||
           specificity_degenerate || f1_degenerate || roc_auc_degenerate;
  }
  bool operator==(const MetricsReport&) const = default;
};

MetricsReport report(const ConfusionCounts& counts,
                     std::span<const double> scores,
                     std::span<const int> labels);

// Mann-Whitney statistic P(s+ > s-) + P(s+ == s-)/2 by sorting, with tied
// groups credited exactly. Throws ValidationError unless both classes are
// present.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  bool operator==(const RocPoint&) const = default;
};

// One point per distinct score (descending threshold) plus (0, 0); ends at
// (1, 1).
std::vector<RocPoint> roc_curve(std::span<const double> scores,
                                std::span<const int> labels);
double trapezoid_area(std::span<const RocPoint> curve);
// "fpr,tpr" header and one line per point.
std::string roc_curve_text(std::span<const RocPoint> curve);

struct EfficientClassReport {
  char efficient = 'L';  // 'L' or 'R'
  double left_recall = 0.0;
  double right_recall = 0.0;
};

// right_recall = tp/(tp+fn), left_recall = tn/(tn+fp) (0 for empty
// classes); the larger wins, L on ties.
EfficientClassReport efficient_class(const ConfusionCounts& counts);

}  // namespace hemi::metrics

#endif  // HEMI_METRICS_H_
