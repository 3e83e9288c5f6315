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

#include "hemi/metrics.h"

#include <algorithm>
#include <charconv>
#include <numeric>

#include "hemi/error.h"

namespace hemi::metrics {
namespace {

void check_inputs(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw DimensionError("got " + std::to_string(scores.size()) +
                         " scores but " + std::to_string(labels.size()) +
                         " labels");
  }
  if (scores.empty()) throw ValidationError("no scores to evaluate");
  for (int y : labels) {
    if (y != 0 && y != 1) throw ValidationError("labels must be 0 or 1");
  }
}

double ratio(std::size_t num, std::size_t den, bool& degenerate) {
  degenerate = den == 0;
  return degenerate ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

// Indices sorted by descending score; stable so ties keep input order.
std::vector<std::size_t> descending(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  return order;
}

}  // namespace

ConfusionCounts confusion(std::span<const double> scores,
                          std::span<const int> labels, double threshold) {
  check_inputs(scores, labels);
  ConfusionCounts c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (labels[i] == 1) {
      predicted ? ++c.tp : ++c.fn;
    } else {
      predicted ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

MetricsReport report(const ConfusionCounts& counts,
                     std::span<const double> scores,
                     std::span<const int> labels) {
  MetricsReport r;
  r.precision = ratio(counts.tp, counts.tp + counts.fp, r.precision_degenerate);
  r.recall = ratio(counts.tp, counts.tp + counts.fn, r.recall_degenerate);
  r.specificity =
      ratio(counts.tn, counts.tn + counts.fp, r.specificity_degenerate);
  bool unused = false;
  r.accuracy = ratio(counts.tp + counts.tn, counts.total(), unused);
  const double pr = r.precision + r.recall;
  r.f1_degenerate = pr == 0.0;
  r.f1 = r.f1_degenerate ? 0.0 : 2.0 * r.precision * r.recall / pr;
  r.collapsed = (counts.tp + counts.fp == 0) || (counts.tn + counts.fn == 0);

  const bool has_pos = counts.tp + counts.fn > 0;
  const bool has_neg = counts.tn + counts.fp > 0;
  if (has_pos && has_neg && !scores.empty()) {
    r.roc_auc = roc_auc(scores, labels);
  } else {
    r.roc_auc_degenerate = true;
  }
  return r;
}

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  check_inputs(scores, labels);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Twice the Mann-Whitney U: each (pos, neg) pair with the positive above
  // counts 2, a tie counts 1. Integer arithmetic keeps the result exact.
  unsigned long long twice_u = 0;
  std::size_t neg_below = 0, n_pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    std::size_t pos_group = 0, neg_group = 0;
    while (j < n && scores[order[j]] == scores[order[i]]) {
      labels[order[j]] == 1 ? ++pos_group : ++neg_group;
      ++j;
    }
    twice_u += 2ULL * pos_group * neg_below +
               static_cast<unsigned long long>(pos_group) * neg_group;
    neg_below += neg_group;
    n_pos += pos_group;
    i = j;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw ValidationError("ROC AUC needs both classes present");
  }
  return static_cast<double>(twice_u) /
         (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

std::vector<RocPoint> roc_curve(std::span<const double> scores,
                                std::span<const int> labels) {
  check_inputs(scores, labels);
  const auto n_pos = static_cast<std::size_t>(
      std::count(labels.begin(), labels.end(), 1));
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw ValidationError("ROC curve needs both classes present");
  }
  const auto order = descending(scores);
  std::vector<RocPoint> curve = {{0.0, 0.0}};
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    while (i < order.size() && scores[order[i]] == s) {
      labels[order[i]] == 1 ? ++tp : ++fp;
      ++i;
    }
    curve.push_back({static_cast<double>(fp) / static_cast<double>(n_neg),
                     static_cast<double>(tp) / static_cast<double>(n_pos)});
  }
  return curve;
}

double trapezoid_area(std::span<const RocPoint> curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    area += (curve[i].fpr - curve[i - 1].fpr) *
            (curve[i].tpr + curve[i - 1].tpr) / 2.0;
  }
  return area;
}

std::string roc_curve_text(std::span<const RocPoint> curve) {
  std::string out = "fpr,tpr\n";
  char buf[32];
  for (const RocPoint& p : curve) {
    auto [e1, ec1] = std::to_chars(buf, buf + sizeof(buf), p.fpr);
    out.append(buf, e1);
    out += ',';
    auto [e2, ec2] = std::to_chars(buf, buf + sizeof(buf), p.tpr);
    out.append(buf, e2);
    out += '\n';
  }
  return out;
}

EfficientClassReport efficient_class(const ConfusionCounts& counts) {
  EfficientClassReport r;
  bool unused = false;
  r.right_recall = ratio(counts.tp, counts.tp + counts.fn, unused);
  r.left_recall = ratio(counts.tn, counts.tn + counts.fp, unused);
  r.efficient = r.right_recall > r.left_recall ? 'R' : 'L';
  return r;
}

}  // namespace hemi::metrics
