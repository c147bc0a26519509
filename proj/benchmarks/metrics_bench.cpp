// Copyright 2026 The evhdr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <benchmark/benchmark.h>

#include "evhdr/image.hpp"
#include "evhdr/metrics.hpp"
#include "support/generators.hpp"

namespace {

void BM_Ssim(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  evhdr::testing::Gen gen(5);
  const evhdr::ImageF a = gen.image(side, side), b = gen.image(side, side);
  for (auto _ : state) benchmark::DoNotOptimize(evhdr::ssim(a, b));
  state.SetItemsProcessed(state.iterations() * side * side);
}

void BM_Mse(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  evhdr::testing::Gen gen(6);
  const evhdr::ImageF a = gen.image(side, side), b = gen.image(side, side);
  for (auto _ : state) benchmark::DoNotOptimize(evhdr::mse(a, b));
  state.SetItemsProcessed(state.iterations() * side * side);
}

BENCHMARK(BM_Ssim)->Arg(64)->Arg(256);
BENCHMARK(BM_Mse)->Arg(256);

}  // namespace
