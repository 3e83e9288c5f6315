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

#include "hemi/attribution.h"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>

#include "hemi/error.h"

namespace hemi::attribution {
namespace {

// Upper bound on doubles handed to the value function in one call.
constexpr std::size_t kBatchValues = std::size_t{1} << 21;

std::size_t num_segments(std::size_t n_features, std::size_t segment_size) {
  return (n_features + segment_size - 1) / segment_size;
}

void copy_segment(std::span<const double> src, std::span<double> dst,
                  std::size_t segment, std::size_t segment_size) {
  const std::size_t begin = segment * segment_size;
  const std::size_t end = std::min(begin + segment_size, src.size());
  std::copy(src.begin() + static_cast<std::ptrdiff_t>(begin),
            src.begin() + static_cast<std::ptrdiff_t>(end),
            dst.begin() + static_cast<std::ptrdiff_t>(begin));
}

std::vector<double> call(const ValueFn& f, std::span<const double> rows,
                         std::size_t row_len) {
  std::vector<double> out = f(rows, row_len);
  if (out.size() != rows.size() / row_len) {
    throw DimensionError("value function returned " +
                         std::to_string(out.size()) + " outputs for " +
                         std::to_string(rows.size() / row_len) + " rows");
  }
  return out;
}

double mean_background_output(const ValueFn& f,
                              const AttributionConfig& config,
                              std::size_t n) {
  std::vector<double> rows;
  rows.reserve(config.background.size() * n);
  for (const auto& b : config.background) rows.insert(rows.end(), b.begin(), b.end());
  const auto out = call(f, rows, n);
  return std::accumulate(out.begin(), out.end(), 0.0) /
         static_cast<double>(out.size());
}

void append_double(std::string& out, double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, end);
}

}  // namespace

void AttributionConfig::validate(std::size_t n_features) const {
  if (background.empty()) throw ValidationError("background set is empty");
  for (const auto& b : background) {
    if (b.size() != n_features) {
      throw DimensionError("background row has " + std::to_string(b.size()) +
                           " features, instance has " +
                           std::to_string(n_features));
    }
  }
  if (n_permutations < 1) throw ValidationError("n_permutations must be >= 1");
  if (segment_size < 1) throw ValidationError("segment_size must be >= 1");
  if (n_features == 0) throw ValidationError("instance has no features");
}

AttributionResult exact_shapley(const ValueFn& f,
                                std::span<const double> instance,
                                const AttributionConfig& config) {
  const std::size_t n = instance.size();
  config.validate(n);
  const std::size_t d = num_segments(n, config.segment_size);
  if (d > kMaxExactPlayers) {
    throw ValidationError("exact Shapley enumeration is limited to " +
                          std::to_string(kMaxExactPlayers) + " segments, got " +
                          std::to_string(d));
  }
  const std::size_t n_coalitions = std::size_t{1} << d;
  const std::size_t n_bg = config.background.size();

  // v[S] = mean over the background of f(x on S, background elsewhere).
  std::vector<double> v(n_coalitions, 0.0);
  const std::size_t per_call =
      std::max<std::size_t>(1, kBatchValues / (n * n_bg));
  std::vector<double> rows;
  for (std::size_t first = 0; first < n_coalitions; first += per_call) {
    const std::size_t last = std::min(n_coalitions, first + per_call);
    rows.assign((last - first) * n_bg * n, 0.0);
    for (std::size_t s = first; s < last; ++s) {
      for (std::size_t b = 0; b < n_bg; ++b) {
        std::span<double> row(rows.data() + ((s - first) * n_bg + b) * n, n);
        std::copy(config.background[b].begin(), config.background[b].end(),
                  row.begin());
        for (std::size_t j = 0; j < d; ++j) {
          if (s & (std::size_t{1} << j)) {
            copy_segment(instance, row, j, config.segment_size);
          }
        }
      }
    }
    const auto out = call(f, rows, n);
    for (std::size_t s = first; s < last; ++s) {
      double sum = 0.0;
      for (std::size_t b = 0; b < n_bg; ++b) sum += out[(s - first) * n_bg + b];
      v[s] = sum / static_cast<double>(n_bg);
    }
  }

  // weight[k] = k! (d - k - 1)! / d!
  std::vector<double> weight(d);
  for (std::size_t k = 0; k < d; ++k) {
    double w = 1.0 / static_cast<double>(d);
    // 1 / (d * C(d-1, k))
    for (std::size_t i = 1; i <= k; ++i) {
      w *= static_cast<double>(i) / static_cast<double>(d - i);
    }
    weight[k] = w;
  }

  AttributionResult r;
  r.phi.assign(d, 0.0);
  r.std_error.assign(d, 0.0);
  r.segment_size = config.segment_size;
  r.n_features = n;
  for (std::size_t i = 0; i < d; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    double phi = 0.0;
    for (std::size_t s = 0; s < n_coalitions; ++s) {
      if (s & bit) continue;
      const auto k = static_cast<std::size_t>(std::popcount(s));
      phi += weight[k] * (v[s | bit] - v[s]);
    }
    r.phi[i] = phi;
  }
  r.base_value = v[0];
  r.explained_output = v[n_coalitions - 1];
  return r;
}

AttributionResult sampled_shapley(const ValueFn& f,
                                  std::span<const double> instance,
                                  const AttributionConfig& config) {
  const std::size_t n = instance.size();
  config.validate(n);
  const std::size_t d = num_segments(n, config.segment_size);
  const std::size_t n_bg = config.background.size();
  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<std::size_t> pick(0, n_bg - 1);

  // Welford accumulators per segment.
  std::vector<double> mean(d, 0.0), m2(d, 0.0);
  std::size_t count = 0;

  const std::size_t rows_per_perm = d + 1;
  const std::size_t perms_per_call =
      std::max<std::size_t>(1, kBatchValues / (rows_per_perm * n));
  std::vector<double> rows;
  std::vector<std::vector<std::size_t>> orders;
  std::vector<std::size_t> perm(d);
  for (std::size_t done = 0; done < config.n_permutations;) {
    const std::size_t batch =
        std::min(perms_per_call, config.n_permutations - done);
    rows.resize(batch * rows_per_perm * n);
    orders.assign(batch, {});
    for (std::size_t p = 0; p < batch; ++p) {
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      std::shuffle(perm.begin(), perm.end(), rng);
      const auto& bg = config.background[pick(rng)];
      double* base = rows.data() + p * rows_per_perm * n;
      std::copy(bg.begin(), bg.end(), base);
      for (std::size_t k = 0; k < d; ++k) {
        std::copy(base + k * n, base + (k + 1) * n, base + (k + 1) * n);
        copy_segment(instance, std::span<double>(base + (k + 1) * n, n),
                     perm[k], config.segment_size);
      }
      orders[p] = perm;
    }
    const auto out = call(f, rows, n);
    for (std::size_t p = 0; p < batch; ++p) {
      ++count;
      const double* o = out.data() + p * rows_per_perm;
      for (std::size_t k = 0; k < d; ++k) {
        const std::size_t j = orders[p][k];
        const double x = o[k + 1] - o[k];
        const double delta = x - mean[j];
        mean[j] += delta / static_cast<double>(count);
        m2[j] += delta * (x - mean[j]);
      }
    }
    done += batch;
  }

  AttributionResult r;
  r.phi = mean;
  r.std_error.assign(d, 0.0);
  if (count > 1) {
    for (std::size_t j = 0; j < d; ++j) {
      r.std_error[j] = std::sqrt(m2[j] / static_cast<double>(count - 1) /
                                 static_cast<double>(count));
    }
  }
  r.segment_size = config.segment_size;
  r.n_features = n;
  r.base_value = mean_background_output(f, config, n);
  r.explained_output =
      call(f, std::vector<double>(instance.begin(), instance.end()), n)[0];
  return r;
}

TopImpact top_impact(const AttributionResult& result, double sample_rate) {
  if (result.phi.empty()) throw ValidationError("attribution has no features");
  std::size_t best = 0;
  for (std::size_t j = 1; j < result.phi.size(); ++j) {
    if (std::abs(result.phi[j]) > std::abs(result.phi[best])) best = j;
  }
  TopImpact t;
  t.feature_index = result.feature_index(best);
  t.positive = result.phi[best] >= 0.0;
  t.time_seconds = static_cast<double>(t.feature_index) / sample_rate;
  return t;
}

std::vector<FeatureSummary> summarize(std::span<const AttributionResult> results,
                                      double sample_rate) {
  if (results.empty()) throw ValidationError("no attribution results");
  const std::size_t d = results.front().phi.size();
  const std::size_t seg = results.front().segment_size;
  std::vector<double> sum(d, 0.0), abs_sum(d, 0.0);
  for (const AttributionResult& r : results) {
    if (r.phi.size() != d || r.segment_size != seg) {
      throw DimensionError("attribution results differ in feature layout");
    }
    for (std::size_t j = 0; j < d; ++j) {
      sum[j] += r.phi[j];
      abs_sum[j] += std::abs(r.phi[j]);
    }
  }
  const auto m = static_cast<double>(results.size());
  std::vector<FeatureSummary> rows(d);
  for (std::size_t j = 0; j < d; ++j) {
    rows[j].feature_index = j * seg;
    rows[j].time_s = static_cast<double>(rows[j].feature_index) / sample_rate;
    rows[j].phi_mean = sum[j] / m;
    rows[j].phi_abs_mean = abs_sum[j] / m;
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const FeatureSummary& a, const FeatureSummary& b) {
                     return a.phi_abs_mean > b.phi_abs_mean;
                   });
  return rows;
}

std::string summary_text(std::span<const FeatureSummary> rows) {
  std::string out = "feature_index,time_s,phi_mean,phi_abs_mean\n";
  for (const FeatureSummary& r : rows) {
    out += std::to_string(r.feature_index);
    out += ',';
    append_double(out, r.time_s);
    out += ',';
    append_double(out, r.phi_mean);
    out += ',';
    append_double(out, r.phi_abs_mean);
    out += '\n';
  }
  return out;
}

}  // namespace hemi::attribution
