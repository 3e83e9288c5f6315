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

#include <random>

#include <benchmark/benchmark.h>

#include "hemi/optim.h"

namespace {

using namespace hemi::optim;

void BM_Step(benchmark::State& state) {
  const Rule rule = kAllRules[state.range(0)];
  const std::size_t n = 1 << 20;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z;
  std::vector<double> params(n), grads(n);
  for (double& v : params) v = z(rng);
  for (double& v : grads) v = z(rng);
  SlotState slots;
  const OptimizerConfig config = default_config(rule, 1e-3);
  for (auto _ : state) {
    step(params, grads, slots, config);
    benchmark::ClobberMemory();
  }
  state.SetLabel(std::string(rule_name(rule)));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}
BENCHMARK(BM_Step)->DenseRange(0, 7);

}  // namespace
