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

#include "hemi/experiment.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <numeric>
#include <random>
#include <set>
#include <thread>
#include <tuple>

#include "hemi/error.h"
#include "hemi/random.h"
#include "hemi/training.h"

namespace hemi::runner {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double accuracy(const std::vector<double>& scores, const std::vector<int>& labels) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    hits += (scores[i] >= 0.5) == (labels[i] == 1);
  }
  return static_cast<double>(hits) / static_cast<double>(scores.size());
}

auto sort_key(const RunResult& r) {
  return std::make_tuple(static_cast<int>(r.band), static_cast<int>(r.dataset),
                         static_cast<int>(r.model), static_cast<int>(r.optimizer));
}

RunResult blank_result(const ExperimentConfig& c) {
  RunResult r;
  r.band = c.band;
  r.dataset = c.dataset;
  r.model = c.model;
  r.optimizer = c.optimizer;
  return r;
}

std::string cell_key(signal::Band band, signal::Dataset dataset,
                     nn::ModelKind model, optim::Rule rule) {
  return std::string(signal::band_name(band)) + "/" +
         std::string(signal::dataset_short_name(dataset)) + "/" +
         std::string(nn::model_kind_name(model)) + "/" +
         std::string(optim::rule_name(rule));
}

// Positive-class output of `model` for each row of a packed batch.
attribution::ValueFn value_function(nn::Model& model) {
  return [&model](std::span<const double> rows, std::size_t row_len) {
    nn::Tensor batch({rows.size() / row_len, row_len},
                     std::vector<double>(rows.begin(), rows.end()));
    return predict_scores(model, batch);
  };
}

void explain(const ExperimentConfig& config, nn::Model& model,
             const ArraySet& train_set, const ArraySet& test_set,
             CellOutput& out) {
  const ShapBudget& budget = config.shap;
  std::mt19937_64 rng(derive_seed(config.seed, config.key() + "/background"));
  std::vector<std::size_t> pool(train_set.size());
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(std::min(pool.size(), budget.background));

  attribution::AttributionConfig ac;
  for (std::size_t i : pool) {
    const auto row = train_set.features.row(i);
    ac.background.emplace_back(row.begin(), row.end());
  }
  ac.n_permutations = budget.permutations;
  ac.segment_size = std::min(budget.segment_size, model.input_dim());
  const auto f = value_function(model);

  std::vector<attribution::AttributionResult> results;
  const std::size_t n = std::min(budget.instances, test_set.size());
  for (std::size_t i = 0; i < n; ++i) {
    ac.seed = derive_seed(config.seed, config.key() + "/shap/" + std::to_string(i));
    results.push_back(
        attribution::sampled_shapley(f, test_set.features.row(i), ac));
  }
  if (results.empty()) return;
  out.shap_summary = attribution::summarize(results);

  attribution::AttributionResult mean = results.front();
  for (std::size_t j = 0; j < mean.phi.size(); ++j) {
    double s = 0.0;
    for (const auto& r : results) s += r.phi[j];
    mean.phi[j] = s / static_cast<double>(results.size());
  }
  out.result.shap_sign = attribution::top_impact(mean).sign();
}

}  // namespace

double default_learning_rate(nn::ModelKind kind) {
  switch (kind) {
    case nn::ModelKind::kBig: return 0.01;
    case nn::ModelKind::kSmall: return 1e-5;
    case nn::ModelKind::kCnn: return 1e-3;
  }
  throw ValidationError("unknown model kind");
}

double ExperimentConfig::effective_learning_rate() const {
  return learning_rate.value_or(default_learning_rate(model));
}

optim::OptimizerConfig ExperimentConfig::optimizer_config() const {
  optim::OptimizerConfig c =
      optim::default_config(optimizer, effective_learning_rate());
  c.momentum = momentum;
  c.l1 = l1;
  c.l2 = l2;
  return c;
}

void ExperimentConfig::validate() const {
  if (!(effective_learning_rate() > 0.0) ||
      !std::isfinite(effective_learning_rate())) {
    throw ValidationError("learning_rate must be a finite value > 0");
  }
  optimizer_config().validate();
  TrainOptions{batch_size, max_epochs, patience, min_delta, seed, {}}.validate();
  if (shap.permutations > 0 && (shap.background < 1 || shap.instances < 1 ||
                                shap.segment_size < 1)) {
    throw ValidationError(
        "attribution needs background, instances and segment size >= 1");
  }
}

std::string ExperimentConfig::key() const {
  return cell_key(band, dataset, model, optimizer);
}

std::string RunResult::key() const {
  return cell_key(band, dataset, model, optimizer);
}

CellOutput run_cell(const ExperimentConfig& config,
                    const std::vector<signal::RawRecording>& recordings,
                    const LogFn& log) {
  config.validate();
  CellOutput out;
  out.result = blank_result(config);
  RunResult& r = out.result;

  auto start = Clock::now();
  std::vector<signal::RawRecording> subset;
  for (const auto& rec : recordings) {
    if (rec.dataset == config.dataset) subset.push_back(rec);
  }
  if (subset.empty()) {
    throw ValidationError("no recordings for dataset " +
                          std::string(signal::dataset_name(config.dataset)));
  }
  signal::DatasetOptions dopt;
  dopt.standardize = config.standardize;
  auto examples = signal::build_dataset(subset, config.band, dopt);
  subset.clear();
  const std::string split_key = std::string(signal::band_name(config.band)) +
                                "/" +
                                std::string(signal::dataset_short_name(config.dataset));
  auto split = signal::split_dataset(std::move(examples),
                                     derive_seed(config.seed, "split/" + split_key));
  const ArraySet train_set = to_arrays(split.train);
  const ArraySet val_set = to_arrays(split.val);
  const ArraySet test_set = to_arrays(split.test);
  split = {};
  r.preprocessing_s = seconds_since(start);

  start = Clock::now();
  nn::ModelOptions mopt = config.model_options;
  mopt.seed = derive_seed(config.seed, config.key() + "/init");
  out.model = nn::build_model(config.model, train_set.features.row_size(), mopt);
  TrainOptions topt{config.batch_size, config.max_epochs, config.patience,
                    config.min_delta, derive_seed(config.seed, config.key() + "/shuffle"),
                    {}};
  if (log) {
    topt.on_epoch = [&](const EpochRecord& e) {
      log("[" + config.key() + "] epoch " + std::to_string(e.epoch) + " train_loss " +
          std::to_string(e.train_loss) + " val_loss " + std::to_string(e.val_loss));
    };
  }
  const TrainHistory history =
      train(out.model, config.optimizer_config(), train_set, val_set, topt);
  r.train_s = seconds_since(start);
  r.epochs = history.epochs_run();

  r.train_acc = accuracy(predict_scores(out.model, train_set.features), train_set.labels);
  r.val_acc = accuracy(predict_scores(out.model, val_set.features), val_set.labels);
  const Evaluation ev = evaluate(out.model, test_set);
  r.inference_s = ev.inference_s;
  r.test = ev.report;
  r.test_acc = ev.report.accuracy;
  if (!ev.report.roc_auc_degenerate) {
    out.roc = metrics::roc_curve(ev.scores, test_set.labels);
  }
  if (!ev.report.collapsed) {
    r.efficient_class = std::string(1, metrics::efficient_class(ev.counts).efficient);
  }

  if (config.shap.permutations > 0 && !ev.report.collapsed) {
    start = Clock::now();
    explain(config, out.model, train_set, test_set, out);
    r.shap_s = seconds_since(start);
  }
  return out;
}

std::vector<ExperimentConfig> expand_grid(
    const ExperimentConfig& base, const std::vector<signal::Band>& bands,
    const std::vector<signal::Dataset>& datasets,
    const std::vector<nn::ModelKind>& models,
    const std::vector<optim::Rule>& optimizers) {
  std::vector<ExperimentConfig> out;
  for (auto band : bands) {
    for (auto dataset : datasets) {
      for (auto model : models) {
        for (auto rule : optimizers) {
          ExperimentConfig c = base;
          c.band = band;
          c.dataset = dataset;
          c.model = model;
          c.optimizer = rule;
          out.push_back(c);
        }
      }
    }
  }
  return out;
}

void sort_rows(ResultTable& table) {
  std::stable_sort(table.begin(), table.end(),
                   [](const RunResult& a, const RunResult& b) {
                     return sort_key(a) < sort_key(b);
                   });
}

ResultTable run_grid(const std::vector<ExperimentConfig>& configs,
                     const std::vector<signal::RawRecording>& recordings,
                     std::size_t jobs, const LogFn& log) {
  std::set<std::string> keys;
  for (const auto& c : configs) {
    if (!keys.insert(c.key()).second) {
      throw ValidationError("duplicate grid cell " + c.key());
    }
    c.validate();
  }

  ResultTable table(configs.size());
  std::mutex log_mutex;
  auto emit = [&](const std::string& line) {
    if (!log) return;
    std::lock_guard<std::mutex> lock(log_mutex);
    log(line);
  };
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      const ExperimentConfig& c = configs[i];
      emit("[" + c.key() + "] start");
      try {
        table[i] = run_cell(c, recordings, emit).result;
        emit("[" + c.key() + "] done: test_acc " + std::to_string(table[i].test_acc) +
             ", roc_auc " + std::to_string(table[i].test.roc_auc) + ", epochs " +
             std::to_string(table[i].epochs));
      } catch (const std::exception& e) {
        table[i] = blank_result(c);
        table[i].error = e.what();
        emit("[" + c.key() + "] failed: " + e.what());
      }
    }
  };
  const std::size_t n_threads = std::max<std::size_t>(1, std::min(jobs, configs.size()));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  sort_rows(table);
  return table;
}

}  // namespace hemi::runner
