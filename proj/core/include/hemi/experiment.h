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

#ifndef HEMI_EXPERIMENT_H_
#define HEMI_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hemi/attribution.h"
#include "hemi/dataset.h"
#include "hemi/filter.h"
#include "hemi/metrics.h"
#include "hemi/model.h"
#include "hemi/optim.h"
#include "hemi/recording.h"

namespace hemi::runner {

// Big 0.01, Small 1e-5, CNN 1e-3.
double default_learning_rate(nn::ModelKind kind);

struct ShapBudget {
  std::size_t permutations = 100;  // 0 disables attribution
  std::size_t background = 50;
  std::size_t instances = 5;       // test examples explained per cell
  std::size_t segment_size = 250;  // 1 s at 250 Hz
};

// One cell of the experiment grid.
struct ExperimentConfig {
  signal::Band band = signal::Band::kBeta;
  signal::Dataset dataset = signal::Dataset::kNeckerCube;
  nn::ModelKind model = nn::ModelKind::kSmall;
  optim::Rule optimizer = optim::Rule::kAdam;
  std::optional<double> learning_rate;  // unset: default_learning_rate(model)
  double momentum = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 150;
  std::size_t patience = 10;
  double min_delta = 1e-5;
  std::uint64_t seed = 0;
  bool standardize = false;
  nn::ModelOptions model_options;
  ShapBudget shap;

  double effective_learning_rate() const;
  optim::OptimizerConfig optimizer_config() const;
  // Throws ValidationError for out-of-range values.
  void validate() const;
  // "beta/necker/small/adam"
  std::string key() const;
};

struct RunResult {
  signal::Band band = signal::Band::kBeta;
  signal::Dataset dataset = signal::Dataset::kNeckerCube;
  nn::ModelKind model = nn::ModelKind::kSmall;
  optim::Rule optimizer = optim::Rule::kAdam;

  double train_acc = 0.0;
  double val_acc = 0.0;
  double test_acc = 0.0;
  metrics::MetricsReport test;
  std::string efficient_class = "-";  // "L", "R", or "-" when collapsed
  std::string shap_sign = "-";        // "+ve", "-ve", or "-" when skipped
  std::size_t epochs = 0;
  double preprocessing_s = 0.0;
  double train_s = 0.0;
  double inference_s = 0.0;
  double shap_s = 0.0;
  std::string error;  // set when the cell failed

  std::string key() const;
  bool failed() const { return !error.empty(); }
  bool operator==(const RunResult&) const = default;
};

using ResultTable = std::vector<RunResult>;

// Everything a single cell produces, including artefacts that do not go
// into the report table.
struct CellOutput {
  RunResult result;
  nn::Model model;
  std::vector<metrics::RocPoint> roc;
  std::vector<attribution::FeatureSummary> shap_summary;
};

using LogFn = std::function<void(const std::string& line)>;

// Filters the config's dataset out of `recordings`, builds and splits the
// band's examples, trains, evaluates on the test split and, unless the
// predictions collapsed to one class, runs sampled Shapley attribution.
// `log`, when set, receives one line per epoch.
CellOutput run_cell(const ExperimentConfig& config,
                    const std::vector<signal::RawRecording>& recordings,
                    const LogFn& log = {});

// Cartesian product in band, dataset, model, optimizer order, each cell a
// copy of `base` with the four keys replaced.
std::vector<ExperimentConfig> expand_grid(
    const ExperimentConfig& base, const std::vector<signal::Band>& bands,
    const std::vector<signal::Dataset>& datasets,
    const std::vector<nn::ModelKind>& models,
    const std::vector<optim::Rule>& optimizers);

// Runs every cell (on up to `jobs` threads). A failing cell is recorded with
// its error and the rest continue. Rows come back sorted by key, so the
// table does not depend on config order or scheduling. Duplicate keys throw
// ValidationError before anything runs.
ResultTable run_grid(const std::vector<ExperimentConfig>& configs,
                     const std::vector<signal::RawRecording>& recordings,
                     std::size_t jobs = 1, const LogFn& log = {});

// Orders rows by (band, dataset, model, optimizer).
void sort_rows(ResultTable& table);

}  // namespace hemi::runner

#endif  // HEMI_EXPERIMENT_H_
