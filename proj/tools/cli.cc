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

#include "cli.h"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>

#include <CLI11.hpp>

#include "hemi/attribution.h"
#include "hemi/dataset.h"
#include "hemi/error.h"
#include "hemi/experiment.h"
#include "hemi/model.h"
#include "hemi/random.h"
#include "hemi/recording.h"
#include "hemi/report.h"
#include "hemi/synthetic.h"
#include "hemi/training.h"

namespace hemi::cli {
namespace {

// Reads a flat key=value file and files every key under the chosen
// subcommand, so `hemi train --config run.ini` can say `band=alpha`.
class SubcommandConfig : public CLI::ConfigINI {
 public:
  std::string subcommand;

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    auto items = CLI::ConfigINI::from_config(input);
    for (auto& item : items) {
      if (item.parents.empty() && !subcommand.empty()) item.parents.push_back(subcommand);
    }
    return items;
  }
};

// Options shared by the commands that need recordings: either a corpus
// directory or an in-memory synthetic corpus.
struct SourceOptions {
  std::string corpus;
  int participants = 10;
  int intensities = 10;
  std::size_t length = signal::kSamplesPerChannel;
  std::vector<double> left_gains = {1, 1, 1, 2, 1};
  std::vector<double> right_gains = {1, 1, 1, 1, 1};
  double noise = 1.0;
  double jitter = 0.1;
  double spread = 0.0;
  bool symmetric = false;
};

struct TrainFlags {
  std::optional<double> lr;
  double momentum = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 150;
  std::size_t patience = 10;
  double min_delta = 1e-5;
  bool standardize = false;
  std::string activation = "relu";
  std::size_t small_hidden = 64;
  std::size_t cnn_hidden = 64;
  runner::ShapBudget shap;
};

void add_source_options(CLI::App* app, SourceOptions& s, bool with_corpus) {
  if (with_corpus) {
    app->add_option("--corpus", s.corpus,
                    "Recording directory; a synthetic corpus is generated when omitted");
  }
  app->add_option("--participants", s.participants, "Synthetic participants per dataset")
      ->check(CLI::PositiveNumber);
  app->add_option("--intensities", s.intensities, "Synthetic intensities per participant")
      ->check(CLI::Range(1, 10));
  app->add_option("--length", s.length, "Samples per channel")->check(CLI::Range(16, 1000000));
  app->add_option("--left-gains", s.left_gains,
                  "Left-hemisphere band power gains: delta,theta,alpha,beta,gamma")
      ->delimiter(',')
      ->expected(5);
  app->add_option("--right-gains", s.right_gains, "Right-hemisphere band power gains")
      ->delimiter(',')
      ->expected(5);
  app->add_option("--noise", s.noise, "Pink-noise amplitude");
  app->add_option("--jitter", s.jitter, "Relative sinusoid amplitude jitter");
  app->add_option("--frequency-spread", s.spread,
                  "Random sinusoid frequency offset as a fraction of its slot")
      ->check(CLI::Range(0.0, 1.0));
  app->add_flag("--symmetric", s.symmetric, "Use gain 1 for every band on both sides");
}

void add_train_options(CLI::App* app, TrainFlags& t) {
  app->add_option("--lr", t.lr, "Learning rate (default depends on the model)");
  app->add_option("--momentum", t.momentum, "SGD momentum");
  app->add_option("--l1", t.l1, "FTRL L1 strength");
  app->add_option("--l2", t.l2, "FTRL L2 strength");
  app->add_option("--batch-size", t.batch_size, "Mini-batch size");
  app->add_option("--max-epochs", t.max_epochs, "Epoch limit");
  app->add_option("--patience", t.patience, "Early-stopping patience in epochs");
  app->add_option("--min-delta", t.min_delta, "Minimum validation-loss improvement");
  app->add_flag("--standardize", t.standardize, "Z-score each example after filtering");
  app->add_option("--activation", t.activation, "Hidden activation: relu, leaky_relu, sigmoid, tanh");
  app->add_option("--small-hidden", t.small_hidden, "Width of the Small model's first layer");
  app->add_option("--cnn-hidden", t.cnn_hidden, "Width of the CNN's first dense layer");
  app->add_option("--shap-permutations", t.shap.permutations,
                  "Permutations per explained example (0 disables attribution)");
  app->add_option("--shap-background", t.shap.background, "Background examples");
  app->add_option("--shap-instances", t.shap.instances, "Test examples explained");
  app->add_option("--shap-segment", t.shap.segment_size, "Samples per attribution segment");
}

signal::SyntheticConfig synthetic_config(const SourceOptions& s, std::uint64_t seed) {
  signal::SyntheticConfig c;
  c.seed = seed;
  c.length = s.length;
  c.noise_amplitude = s.noise;
  c.jitter = s.jitter;
  c.frequency_spread = s.spread;
  if (s.left_gains.size() != 5 || s.right_gains.size() != 5) {
    throw ValidationError("band gains need exactly five values");
  }
  std::copy(s.left_gains.begin(), s.left_gains.end(), c.left_gain.begin());
  std::copy(s.right_gains.begin(), s.right_gains.end(), c.right_gain.begin());
  if (s.symmetric) {
    c.left_gain.fill(1.0);
    c.right_gain.fill(1.0);
  }
  return c;
}

std::vector<signal::RawRecording> load_source(const SourceOptions& s,
                                              std::uint64_t seed,
                                              std::ostream& err) {
  if (!s.corpus.empty()) {
    auto recs = signal::load_recordings(s.corpus, s.length);
    if (recs.empty()) throw ValidationError("corpus " + s.corpus + " has no recordings");
    err << "loaded " << recs.size() << " recordings from " << s.corpus << "\n";
    return recs;
  }
  auto recs = signal::generate_synthetic(synthetic_config(s, seed), s.participants,
                                         s.intensities);
  err << "generated " << recs.size() << " synthetic recordings\n";
  return recs;
}

runner::ExperimentConfig base_config(const TrainFlags& t, std::uint64_t seed) {
  runner::ExperimentConfig c;
  c.learning_rate = t.lr;
  c.momentum = t.momentum;
  c.l1 = t.l1;
  c.l2 = t.l2;
  c.batch_size = t.batch_size;
  c.max_epochs = t.max_epochs;
  c.patience = t.patience;
  c.min_delta = t.min_delta;
  c.seed = seed;
  c.standardize = t.standardize;
  c.model_options.hidden = nn::parse_activation(t.activation);
  c.model_options.small_hidden = t.small_hidden;
  c.model_options.cnn_hidden = t.cnn_hidden;
  c.shap = t.shap;
  return c;
}

template <typename T>
std::vector<T> parse_list(const std::vector<std::string>& names,
                          T (*parse)(std::string_view), const std::vector<T>& all) {
  if (names.empty()) return all;
  std::vector<T> out;
  for (const auto& n : names) {
    const T v = parse(n);
    if (std::find(out.begin(), out.end(), v) != out.end()) {
      throw ValidationError("'" + n + "' is listed twice");
    }
    out.push_back(v);
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  f << text;
  if (!f) throw IoError("failed writing " + path);
}

void write_table(const runner::ResultTable& table, const std::string& path,
                 const std::string& format, std::ostream& out) {
  if (path.empty()) {
    const auto fmt = format.empty() ? runner::ReportFormat::kCsv
                                    : runner::parse_report_format(format);
    out << (fmt == runner::ReportFormat::kJson ? runner::to_json(table)
                                               : runner::to_csv(table));
    return;
  }
  const auto fmt = format.empty() ? runner::format_for_path(path)
                                  : runner::parse_report_format(format);
  runner::emit_report(table, fmt, path);
}

template <typename T>
std::vector<T> all_of(const T* first, std::size_t n) {
  return std::vector<T>(first, first + n);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"EEG hemisphere classification experiments"};
  app.name("hemi");
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "Random seed");
    sub->allow_config_extras(CLI::config_extras_mode::error);
    sub->fallthrough();
  };

  // synth
  SourceOptions synth_src;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Write a synthetic recording corpus");
  add_common(synth);
  add_source_options(synth, synth_src, false);
  synth->add_option("--out", synth_out, "Output directory")->required();
  std::vector<std::string> synth_datasets;
  synth->add_option("--datasets", synth_datasets, "mona, necker")->delimiter(',');

  // preprocess
  SourceOptions pre_src;
  std::string pre_band = "beta", pre_dataset, pre_out;
  bool pre_standardize = false;
  auto* pre = app.add_subcommand("preprocess", "Filter one band, label and split into train/val/test");
  add_common(pre);
  add_source_options(pre, pre_src, true);
  pre->add_option("--band", pre_band, "delta, theta, alpha, beta, gamma");
  pre->add_option("--dataset", pre_dataset, "Restrict to one dataset (mona or necker)");
  pre->add_flag("--standardize", pre_standardize, "Z-score each example");
  pre->add_option("--out", pre_out, "Output directory")->required();

  // train
  SourceOptions train_src;
  TrainFlags train_flags;
  std::string train_band = "beta", train_dataset = "necker", train_model = "small",
              train_opt = "adam", train_report, train_format, model_out, roc_out,
              shap_out;
  auto* train = app.add_subcommand("train", "Train and evaluate one grid cell");
  add_common(train);
  add_source_options(train, train_src, true);
  add_train_options(train, train_flags);
  train->add_option("--band", train_band, "Rhythm");
  train->add_option("--dataset", train_dataset, "mona or necker");
  train->add_option("--model", train_model, "big, small or cnn");
  train->add_option("--optimizer", train_opt, "sgd, adagrad, adadelta, rmsprop, adam, adamax, nadam, ftrl");
  train->add_option("--report", train_report, "Report file (.csv or .json); stdout when omitted");
  train->add_option("--format", train_format, "csv or json");
  train->add_option("--model-out", model_out, "Save the trained model");
  train->add_option("--roc-out", roc_out, "Write the test ROC curve (fpr,tpr)");
  train->add_option("--shap-out", shap_out, "Write the attribution summary table");

  // grid
  SourceOptions grid_src;
  TrainFlags grid_flags;
  std::vector<std::string> bands, datasets, models, optimizers;
  std::string grid_report, grid_format;
  std::size_t jobs = 1;
  auto* grid = app.add_subcommand("grid", "Run a band x dataset x model x optimizer grid");
  add_common(grid);
  add_source_options(grid, grid_src, true);
  add_train_options(grid, grid_flags);
  grid->add_option("--bands", bands, "Comma-separated rhythms (default all)")->delimiter(',');
  grid->add_option("--datasets", datasets, "Comma-separated datasets (default both)")->delimiter(',');
  grid->add_option("--models", models, "Comma-separated models (default all)")->delimiter(',');
  grid->add_option("--optimizers", optimizers, "Comma-separated optimizers (default all)")->delimiter(',');
  grid->add_option("--jobs", jobs, "Cells run in parallel")->check(CLI::PositiveNumber);
  grid->add_option("--report", grid_report, "Report file (.csv or .json); stdout when omitted");
  grid->add_option("--format", grid_format, "csv or json");

  // explain
  std::string model_file, data_dir, explain_out;
  runner::ShapBudget budget;
  budget.permutations = 200;
  auto* explain = app.add_subcommand("explain", "Shapley attribution for a trained model");
  add_common(explain);
  explain->add_option("--model-file", model_file, "Model saved by train --model-out")->required();
  explain->add_option("--data", data_dir, "Split directory written by preprocess")->required();
  explain->add_option("--permutations", budget.permutations, "Permutations per example")
      ->check(CLI::PositiveNumber);
  explain->add_option("--background", budget.background, "Background examples from train")
      ->check(CLI::PositiveNumber);
  explain->add_option("--instances", budget.instances, "Test examples explained")
      ->check(CLI::PositiveNumber);
  explain->add_option("--segment", budget.segment_size, "Samples per segment")
      ->check(CLI::PositiveNumber);
  explain->add_option("--out", explain_out, "Summary table path; stdout when omitted");

  // report
  std::vector<std::string> inputs;
  std::string merge_out, merge_format;
  auto* report = app.add_subcommand("report", "Merge report files and re-emit them");
  add_common(report);
  report->add_option("inputs", inputs, "Report files (.csv or .json)")->required();
  report->add_option("--out", merge_out, "Output path; stdout when omitted");
  report->add_option("--format", merge_format, "csv or json");

  // --config is parsed by the top-level app; subcommand fallthrough lets it
  // follow the subcommand name.
  app.set_config("--config", "", "Flat key=value file; flags given on the command line win");
  app.allow_config_extras(CLI::config_extras_mode::error);
  auto config_format = std::make_shared<SubcommandConfig>();
  for (const auto& a : args) {
    if (app.get_subcommand_no_throw(a) != nullptr) {
      config_format->subcommand = a;
      break;
    }
  }
  app.config_formatter(config_format);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return 1;
  }

  try {
    if (*synth) {
      auto config = synthetic_config(synth_src, seed);
      if (!synth_datasets.empty()) {
        config.datasets = parse_list(synth_datasets, &signal::parse_dataset,
                                     all_of(signal::kAllDatasets, 2));
      }
      const auto recs = signal::generate_synthetic(config, synth_src.participants,
                                                   synth_src.intensities);
      signal::save_recordings(recs, synth_out);
      err << "wrote " << recs.size() << " recordings to " << synth_out << "\n";
    } else if (*pre) {
      auto recs = load_source(pre_src, seed, err);
      if (!pre_dataset.empty()) {
        const auto ds = signal::parse_dataset(pre_dataset);
        std::erase_if(recs, [&](const auto& r) { return r.dataset != ds; });
      }
      signal::DatasetOptions dopt;
      dopt.standardize = pre_standardize;
      const auto band = signal::parse_band(pre_band);
      auto examples = signal::build_dataset(recs, band, dopt);
      const auto split = signal::split_dataset(std::move(examples), seed);
      signal::save_split(split, pre_out);
      err << "train " << split.train.size() << ", val " << split.val.size()
          << ", test " << split.test.size() << " examples written to " << pre_out
          << "\n";
    } else if (*train) {
      auto config = base_config(train_flags, seed);
      config.band = signal::parse_band(train_band);
      config.dataset = signal::parse_dataset(train_dataset);
      config.model = nn::parse_model_kind(train_model);
      config.optimizer = optim::parse_rule(train_opt);
      config.validate();
      const auto recs = load_source(train_src, seed, err);
      err << "[" << config.key() << "] start\n";
      auto cell = runner::run_cell(config, recs, [&err](const std::string& line) { err << line << "\n"; });
      err << "[" << config.key() << "] done: " << cell.result.epochs << " epochs, roc_auc "
          << cell.result.test.roc_auc << "\n";
      write_table({cell.result}, train_report, train_format, out);
      if (!model_out.empty()) nn::save_model(cell.model, model_out);
      if (!roc_out.empty()) write_text(roc_out, metrics::roc_curve_text(cell.roc));
      if (!shap_out.empty()) {
        write_text(shap_out, attribution::summary_text(cell.shap_summary));
      }
    } else if (*grid) {
      auto base = base_config(grid_flags, seed);
      const auto configs = runner::expand_grid(
          base,
          parse_list(bands, &signal::parse_band, all_of(signal::kAllBands, 5)),
          parse_list(datasets, &signal::parse_dataset, all_of(signal::kAllDatasets, 2)),
          parse_list(models, &nn::parse_model_kind,
                     std::vector<nn::ModelKind>{nn::ModelKind::kBig, nn::ModelKind::kSmall,
                                                nn::ModelKind::kCnn}),
          parse_list(optimizers, &optim::parse_rule, all_of(optim::kAllRules, 8)));
      for (const auto& c : configs) c.validate();
      const auto recs = load_source(grid_src, seed, err);
      const auto table = runner::run_grid(configs, recs, jobs,
                                          [&err](const std::string& line) { err << line << "\n"; });
      write_table(table, grid_report, grid_format, out);
      const auto failed = std::count_if(table.begin(), table.end(),
                                        [](const auto& r) { return r.failed(); });
      if (failed > 0) {
        err << failed << " of " << table.size() << " cells failed\n";
        return 2;
      }
    } else if (*explain) {
      nn::Model model = nn::load_model(model_file);
      const auto split = signal::load_split(data_dir);
      const auto train_set = runner::to_arrays(split.train);
      const auto test_set = runner::to_arrays(split.test);
      if (train_set.features.row_size() != model.input_dim()) {
        throw DimensionError("model expects " + std::to_string(model.input_dim()) +
                             " features, data has " +
                             std::to_string(train_set.features.row_size()));
      }
      std::mt19937_64 rng(derive_seed(seed, "explain/background"));
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
      attribution::ValueFn f = [&model](std::span<const double> rows, std::size_t len) {
        nn::Tensor batch({rows.size() / len, len}, std::vector<double>(rows.begin(), rows.end()));
        return runner::predict_scores(model, batch);
      };
      std::vector<attribution::AttributionResult> results;
      for (std::size_t i = 0; i < std::min(budget.instances, test_set.size()); ++i) {
        ac.seed = derive_seed(seed, "explain/" + std::to_string(i));
        results.push_back(attribution::sampled_shapley(f, test_set.features.row(i), ac));
      }
      const auto rows = attribution::summarize(results);
      const auto top = attribution::top_impact(results.front());
      err << "first instance: top feature " << top.feature_index << " at "
          << top.time_seconds << " s, " << top.sign() << "\n";
      const std::string text = attribution::summary_text(rows);
      if (explain_out.empty()) {
        out << text;
      } else {
        write_text(explain_out, text);
      }
    } else if (*report) {
      runner::ResultTable merged;
      std::set<std::string> keys;
      for (const auto& path : inputs) {
        for (auto& row : runner::read_report(path)) {
          if (!keys.insert(row.key()).second) {
            throw ValidationError("row " + row.key() + " appears in more than one input");
          }
          merged.push_back(std::move(row));
        }
      }
      if (merged.empty()) throw ValidationError("no rows to report");
      runner::sort_rows(merged);
      write_table(merged, merge_out, merge_format, out);
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace hemi::cli
