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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hemi/attribution.h"
#include "hemi/dataset.h"
#include "hemi/experiment.h"
#include "hemi/filter.h"
#include "hemi/layers.h"
#include "hemi/loss.h"
#include "hemi/metrics.h"
#include "hemi/model.h"
#include "hemi/optim.h"
#include "hemi/report.h"
#include "hemi/synthetic.h"
#include "oracles.h"

#if HEMI_HAVE_CLI
#include "cli.h"
#endif

namespace {

using namespace hemi;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// 1
Outcome parameter_totals() {
  const auto start = Clock::now();
  const nn::ParamCount c = nn::count_parameters(nn::build_model(nn::ModelKind::kBig, 15000));
  const double s = std::chrono::duration<double>(Clock::now() - start).count();
  const bool exact = c == nn::ParamCount{40648786, 40639986, 8800};
  return {exact && s < 1.0,
          "total " + std::to_string(c.total) + ", trainable " + std::to_string(c.trainable) +
              ", non-trainable " + std::to_string(c.non_trainable) + fmt(", built in %.2f s", s)};
}

// 2
Outcome layer_counts() {
  const std::vector<std::size_t> expected = {37502500, 10000, 2501000, 4000, 500500, 2000, 100200,
                                             800,      20100, 400,     5050, 200,
                                             1275,     100,   390,     60,   160,  40,  11};
  std::vector<std::size_t> got;
  for (const auto& row : nn::build_model(nn::ModelKind::kBig, 15000).layer_summaries()) {
    if (row.params.total > 0) got.push_back(row.params.total);
  }
  std::size_t matching = 0;
  for (std::size_t i = 0; i < std::min(got.size(), expected.size()); ++i) {
    matching += got[i] == expected[i];
  }
  return {got == expected, std::to_string(matching) + " of 19 rows match, " +
                               std::to_string(got.size()) + " parameterised layers"};
}

// 3
Outcome gradients() {
  using testing::check_layer;
  using testing::random_tensor;
  constexpr int kTrials = 100;
  constexpr double kTol = 1e-5;
  const auto start = Clock::now();
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  std::string worst_name;
  auto note = [&](double e, const std::string& name) {
    if (e > worst || std::isnan(e)) worst = std::isnan(e) ? INFINITY : e, worst_name = name;
  };
  auto away_from_zero = [&](std::vector<std::size_t> shape) {
    nn::Tensor t = random_tensor(std::move(shape), rng);
    for (double& v : t.values()) {
      if (std::abs(v) < 1e-2) v = v < 0 ? v - 1e-2 : v + 1e-2;
    }
    return t;
  };

  for (int t = 0; t < kTrials; ++t) {
    const std::size_t in = pick(rng, 1, 8), out = pick(rng, 1, 8);
    nn::DenseLayer d(in, out, t % 2 == 0, rng);
    note(check_layer(d, random_tensor({pick(rng, 1, 6), in}, rng), rng).worst(), "dense");

    // With two rows the normalised output is +-gamma up to an O(eps) term,
    // so its gradient is too small for a relative comparison.
    const std::size_t f = pick(rng, 1, 8);
    nn::BatchNormLayer bn(f);
    std::uniform_real_distribution<double> u(0.5, 1.5);
    for (double& g : bn.gamma().value) g = u(rng);
    for (double& b : bn.beta().value) b = u(rng) - 1.0;
    note(check_layer(bn, random_tensor({pick(rng, 3, 6), f}, rng), rng).worst(), "batchnorm");

    const std::size_t cin = pick(rng, 1, 3), k = pick(rng, 1, 3);
    nn::Conv1DLayer conv(cin, pick(rng, 1, 3), k, pick(rng, 1, 2), pick(rng, 0, 1), rng);
    note(check_layer(conv, random_tensor({pick(rng, 1, 3), cin, pick(rng, k, 8)}, rng), rng).worst(),
         "conv1d");

    const std::size_t pk = pick(rng, 1, 3), n = pick(rng, 1, 3), c = pick(rng, 1, 3),
                      len = pick(rng, pk, 8);
    nn::MaxPool1DLayer pool(pk, pick(rng, 1, 3));
    note(check_layer(pool, nn::Tensor({n, c, len}, testing::spread_values(n * c * len, -1, 1, 1e-3, rng)),
                     rng)
             .worst(),
         "maxpool1d");

    for (const nn::Activation& act : {nn::Activation::relu(), nn::Activation::leaky_relu(0.01),
                                      nn::Activation::sigmoid(), nn::Activation::tanh()}) {
      nn::ActivationLayer a(act);
      note(check_layer(a, away_from_zero({pick(rng, 1, 6), pick(rng, 1, 8)}), rng).worst(),
           std::string(nn::activation_name(act.kind)));
    }

    nn::FlattenLayer flat;
    note(check_layer(flat, random_tensor({pick(rng, 1, 4), pick(rng, 1, 4), pick(rng, 1, 6)}, rng), rng)
             .worst(),
         "flatten");

    // Losses by central differences on their inputs.
    const std::size_t m = pick(rng, 1, 6);
    std::vector<int> y(m);
    for (int& v : y) v = static_cast<int>(pick(rng, 0, 1));
    nn::Tensor p = random_tensor({m, 1}, rng, 0.05, 0.95);
    nn::Tensor logits = random_tensor({m, 2}, rng, -3.0, 3.0);
    const double h = 1e-5;
    for (int which = 0; which < 2; ++which) {
      nn::Tensor& x = which == 0 ? p : logits;
      auto loss = [&](const nn::Tensor& v) {
        return which == 0 ? nn::bce_loss(v, y) : nn::softmax_ce_loss(v, y);
      };
      const nn::LossResult r = loss(x);
      std::vector<double> num(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        nn::Tensor a = x, b = x;
        a[i] += h;
        b[i] -= h;
        num[i] = (loss(a).loss - loss(b).loss) / (2 * h);
      }
      note(testing::relative_error(r.grad.values(), num), which == 0 ? "bce" : "softmax_ce");
    }
  }
  const double s = std::chrono::duration<double>(Clock::now() - start).count();
  return {worst < kTol && s < 30.0,
          fmt("worst relative error %.2e", worst) + " (" + worst_name + ")" +
              fmt(" over 100 instances per check, %.1f s", s)};
}

// 4
Outcome optimizer_oracles() {
  const auto start = Clock::now();
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> lr_dist(1e-4, 0.5), w_dist(-3.0, 3.0);
  double worst = 0.0;
  for (optim::Rule rule : optim::kAllRules) {
    for (int trial = 0; trial < 20; ++trial) {
      const optim::OptimizerConfig config = optim::default_config(rule, lr_dist(rng));
      const double w0 = w_dist(rng);
      const auto ref = testing::scalar_trajectory(config, w0, 3);
      std::vector<double> w = {w0};
      optim::SlotState state;
      for (int t = 0; t < 3; ++t) {
        const std::vector<double> g = w;
        optim::step(w, g, state, config);
        worst = std::max(worst, std::abs(w[0] - ref[t]));
      }
    }
  }
  const double s = std::chrono::duration<double>(Clock::now() - start).count();
  return {worst < 1e-12 && s < 1.0,
          fmt("max |error| %.2e over 8 rules x 20 pairs x 3 steps, %.3f s", worst, s)};
}

// 5
Outcome auc_exactness() {
  std::mt19937_64 rng(5);
  int equal = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = pick(rng, 2, 50);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    const std::size_t levels = pick(rng, 1, 8);  // few levels force ties
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = static_cast<double>(pick(rng, 0, levels)) / static_cast<double>(levels);
      labels[i] = static_cast<int>(pick(rng, 0, 1));
    }
    labels[0] = 0;
    labels[1] = 1;
    equal += metrics::roc_auc(scores, labels) == testing::brute_force_auc(scores, labels);
  }
  return {equal == 200, std::to_string(equal) + " of 200 instances exactly equal"};
}

// 6
Outcome shapley_oracle() {
  const auto start = Clock::now();
  std::mt19937_64 rng(6);
  std::normal_distribution<double> z(0.0, 1.0);
  double mae_sum = 0.0, worst_mae = 0.0, worst_residual = 0.0;
  for (int m = 0; m < 50; ++m) {
    const std::size_t d = pick(rng, 2, 10), hidden = 6;
    std::vector<double> w1(hidden * d), w2(hidden);
    for (double& v : w1) v = z(rng) / std::sqrt(static_cast<double>(d));
    for (double& v : w2) v = z(rng);
    const attribution::ValueFn f = [=](std::span<const double> rows, std::size_t len) {
      std::vector<double> out;
      for (std::size_t r = 0; r * len < rows.size(); ++r) {
        double y = 0.0;
        for (std::size_t j = 0; j < hidden; ++j) {
          double a = 0.0;
          for (std::size_t i = 0; i < d; ++i) a += w1[j * d + i] * rows[r * len + i];
          y += w2[j] * std::tanh(a);
        }
        out.push_back(y);
      }
      return out;
    };
    attribution::AttributionConfig config;
    for (int b = 0; b < 8; ++b) {
      std::vector<double> row(d);
      for (double& v : row) v = z(rng);
      config.background.push_back(row);
    }
    std::vector<double> x(d);
    for (double& v : x) v = z(rng);
    const auto exact = attribution::exact_shapley(f, x, config);
    const double total = std::accumulate(exact.phi.begin(), exact.phi.end(), 0.0);
    worst_residual =
        std::max(worst_residual, std::abs(total + exact.base_value - exact.explained_output));
    config.n_permutations = 20000;
    config.seed = static_cast<std::uint64_t>(1000 + m);
    const auto sampled = attribution::sampled_shapley(f, x, config);
    double mae = 0.0;
    for (std::size_t i = 0; i < d; ++i) mae += std::abs(sampled.phi[i] - exact.phi[i]);
    mae /= static_cast<double>(d);
    mae_sum += mae;
    worst_mae = std::max(worst_mae, mae);
  }
  const double mean_mae = mae_sum / 50.0;
  const double s = std::chrono::duration<double>(Clock::now() - start).count();
  return {mean_mae < 0.01 && worst_residual < 1e-9 && s < 120.0,
          fmt("mean MAE %.4f (worst model %.4f), ", mean_mae, worst_mae) +
              fmt("exact efficiency residual %.1e, %.1f s", worst_residual, s)};
}

// 7
Outcome filter_selectivity() {
  const auto start = Clock::now();
  auto retained = [](double hz, signal::Band band) {
    const auto x = testing::sinusoid(signal::kSamplesPerChannel, hz, signal::kSampleRate);
    const auto y = signal::apply_filter(x, signal::design_bandpass(band));
    const auto px = testing::power_spectrum(x), py = testing::power_spectrum(y);
    return std::accumulate(py.begin(), py.end(), 0.0) / std::accumulate(px.begin(), px.end(), 0.0);
  };
  const double alpha = retained(10.0, signal::Band::kAlpha);
  const double gamma = retained(10.0, signal::Band::kGamma);
  const double delta = retained(2.0, signal::Band::kDelta);
  const double s = std::chrono::duration<double>(Clock::now() - start).count();
  return {alpha >= 0.9 && gamma <= 0.01 && delta >= 0.9 && s < 5.0,
          fmt("10 Hz: alpha %.4f, gamma %.2e; ", alpha, gamma) +
              fmt("2 Hz: delta %.4f; %.2f s", delta, s)};
}

// 8
Outcome pipeline_arithmetic() {
  signal::SyntheticConfig sc;
  sc.seed = 8;
  sc.length = 1500;
  const auto recs = signal::generate_synthetic(sc, 10, 10);
  std::size_t total = 0;
  bool ok = recs.size() == 200;
  std::string detail = std::to_string(recs.size()) + " recordings; per band";
  for (signal::Band band : signal::kAllBands) {
    auto examples = signal::build_dataset(recs, band);
    const std::size_t n = examples.size();
    total += n;
    const auto split = signal::split_dataset(std::move(examples), 1);
    const auto sizes = signal::split_sizes(n);
    ok = ok && n == 6200 && split.train.size() == 4340 && split.val.size() == 930 &&
         split.test.size() == 930 && sizes.train == 4340 && sizes.val == 930 && sizes.test == 930;
    detail += " " + std::to_string(n) + "(" + std::to_string(split.train.size()) + "/" +
              std::to_string(split.val.size()) + "/" + std::to_string(split.test.size()) + ")";
  }
  ok = ok && total == 31000;
  return {ok, detail + ", total " + std::to_string(total)};
}

// 9
Outcome learnability() {
  const auto start = Clock::now();
  auto corpus = [](bool symmetric, int participants) {
    signal::SyntheticConfig sc;
    sc.seed = 9;
    sc.length = 1500;
    if (symmetric) sc.left_gain = sc.right_gain;
    return signal::generate_synthetic(sc, participants, 10);
  };
  auto cell = [](nn::ModelKind model, optim::Rule rule, double lr, std::size_t epochs,
                 std::size_t patience) {
    runner::ExperimentConfig c;
    c.model = model;
    c.optimizer = rule;
    c.learning_rate = lr;
    c.max_epochs = epochs;
    c.patience = patience;
    c.seed = 9;
    c.shap.permutations = 0;
    return c;
  };
  const auto separable = corpus(false, 10);
  const auto small = runner::run_cell(cell(nn::ModelKind::kSmall, optim::Rule::kNadam, 1e-4, 50, 10),
                                      separable)
                         .result;
  const auto cnn = runner::run_cell(cell(nn::ModelKind::kCnn, optim::Rule::kAdamax, 3e-4, 30, 5),
                                    corpus(false, 3))
                       .result;
  const auto null = runner::run_cell(cell(nn::ModelKind::kSmall, optim::Rule::kNadam, 1e-4, 50, 10),
                                     corpus(true, 10))
                        .result;
  const double s = std::chrono::duration<double>(Clock::now() - start).count();
  const bool ok = small.test.roc_auc >= 0.95 && small.epochs <= 50 && cnn.test.roc_auc >= 0.95 &&
                  cnn.epochs <= 50 && null.test.roc_auc >= 0.4 && null.test.roc_auc <= 0.6 &&
                  s < 600.0;
  return {ok, fmt("small/nadam AUC %.4f, cnn/adamax AUC %.4f, symmetric AUC %.4f", small.test.roc_auc,
                  cnn.test.roc_auc, null.test.roc_auc) +
                  ", epochs " + std::to_string(small.epochs) + "/" + std::to_string(cnn.epochs) +
                  "/" + std::to_string(null.epochs) + fmt(", %.0f s", s)};
}

// 10
Outcome ftrl_degeneracy() {
  signal::SyntheticConfig sc;
  sc.seed = 10;
  sc.length = 1500;
  sc.left_gain = sc.right_gain;
  const auto recs = signal::generate_synthetic(sc, 3, 10);
  runner::ExperimentConfig c;
  c.model = nn::ModelKind::kSmall;
  c.optimizer = optim::Rule::kFtrl;
  c.learning_rate = 0.1;
  c.l1 = 1.0;
  c.max_epochs = 20;
  c.seed = 10;
  c.shap.permutations = 20;
  runner::RunResult r;
  try {
    r = runner::run_cell(c, recs).result;
  } catch (const std::exception& e) {
    return {false, std::string("crashed: ") + e.what()};
  }
  const std::string csv = runner::to_csv({r});
  const std::string row = csv.substr(csv.find('\n') + 1);
  const bool flagged = row.find("0*") != std::string::npos;
  const bool ok = !r.failed() && std::abs(r.test.roc_auc - 0.5) <= 0.05 && flagged;
  return {ok, fmt("ROC AUC %.4f, ", r.test.roc_auc) +
                  (flagged ? "degenerate flags present" : "no degenerate flags") + ", row: " +
                  row.substr(0, row.size() - 1)};
}

// 11
std::string strip_timings(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    std::size_t cut = line.size();
    for (int i = 0; i < 4; ++i) cut = line.rfind(',', cut - 1);
    out += line.substr(0, cut) + "\n";
  }
  return out;
}

Outcome determinism() {
  const std::vector<std::string> args = {
      "grid", "--seed", "11", "--bands", "beta,alpha", "--datasets", "necker", "--models",
      "small,cnn", "--optimizers", "adam,ftrl", "--length", "400", "--participants", "2",
      "--intensities", "2", "--max-epochs", "2", "--cnn-hidden", "4", "--small-hidden", "8",
      "--shap-permutations", "10", "--shap-background", "4", "--shap-instances", "2",
      "--shap-segment", "100"};
  std::string reports[2];
#if HEMI_HAVE_CLI
  for (int run = 0; run < 2; ++run) {
    auto a = args;
    a.push_back("--jobs");
    a.push_back(run == 0 ? "1" : "2");
    std::ostringstream out, err;
    const int code = cli::run_cli(a, out, err);
    if (code != 0) return {false, "grid exited " + std::to_string(code) + ": " + err.str()};
    reports[run] = out.str();
  }
#else
  signal::SyntheticConfig sc;
  sc.seed = 11;
  sc.length = 400;
  const auto recs = signal::generate_synthetic(sc, 2, 2);
  runner::ExperimentConfig base;
  base.seed = 11;
  base.max_epochs = 2;
  base.model_options.cnn_hidden = 4;
  base.model_options.small_hidden = 8;
  base.shap = {10, 4, 2, 100};
  const auto configs = runner::expand_grid(
      base, {signal::Band::kBeta, signal::Band::kAlpha}, {signal::Dataset::kNeckerCube},
      {nn::ModelKind::kSmall, nn::ModelKind::kCnn}, {optim::Rule::kAdam, optim::Rule::kFtrl});
  for (int run = 0; run < 2; ++run) {
    reports[run] = runner::to_csv(runner::run_grid(configs, recs, run + 1));
  }
#endif
  const std::string a = strip_timings(reports[0]), b = strip_timings(reports[1]);
  const auto rows = std::count(a.begin(), a.end(), '\n') - 1;
  return {a == b && rows == 8, std::to_string(rows) + " rows, reports " +
                                   (a == b ? "byte-identical" : "differ") +
                                   " without timing columns"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"parameter accounting", parameter_totals},
      {"layer-by-layer counts", layer_counts},
      {"gradient correctness", gradients},
      {"optimizer oracles", optimizer_oracles},
      {"ROC-AUC exactness", auc_exactness},
      {"Shapley oracle", shapley_oracle},
      {"filter band selectivity", filter_selectivity},
      {"pipeline arithmetic", pipeline_arithmetic},
      {"end-to-end learnability", learnability},
      {"FTRL degeneracy", ftrl_degeneracy},
      {"determinism", determinism},
  };
  int failed = 0, index = 0;
  for (const Criterion& c : criteria) {
    ++index;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", index, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
