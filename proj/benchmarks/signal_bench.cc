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

#include <cmath>
#include <random>

#include <benchmark/benchmark.h>

#include "hemi/filter.h"

namespace {

using namespace hemi::signal;

void BM_ZeroPhaseBandpass(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z;
  std::vector<double> x(n);
  for (double& v : x) v = z(rng);
  const FilterSpec spec = design_bandpass(Band::kBeta);
  for (auto _ : state) benchmark::DoNotOptimize(apply_filter(x, spec));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}
BENCHMARK(BM_ZeroPhaseBandpass)->Arg(1500)->Arg(15000);

void BM_DesignBandpass(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(design_bandpass(Band::kAlpha));
}
BENCHMARK(BM_DesignBandpass);

}  // namespace
