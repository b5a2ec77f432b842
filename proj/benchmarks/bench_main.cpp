//
// Copyright 2026 The svlc-kit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include <benchmark/benchmark.h>

#include <random>

#include "loss_oracle.h"
#include "svlc/lexicon.h"
#include "svlc/lora.h"
#include "svlc/losses.h"
#include "synthetic_corpus.h"

namespace {

using namespace svlc;

void BM_TotalLoss(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto batch = testing::random_batch(1, n, 512, true, true, false);
  LossConfig cfg{100.0, 1.0, 1.0, NegMode::kSeparateLoss};
  for (auto _ : state) benchmark::DoNotOptimize(total_loss(batch, cfg).total);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TotalLoss)->RangeMultiplier(4)->Range(8, 256)->Unit(benchmark::kMicrosecond);

void BM_ContrastiveMerged(benchmark::State& state) {
  auto batch = testing::random_batch(2, static_cast<std::size_t>(state.range(0)), 512, true, false);
  LossConfig cfg{100.0, 1.0, 1.0, NegMode::kMergedIntoContrastive};
  for (auto _ : state) benchmark::DoNotOptimize(contrastive_loss(batch, cfg).value);
}
BENCHMARK(BM_ContrastiveMerged)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_RuleBasedNegative(benchmark::State& state) {
  const auto captions = testing::synthetic_captions(1024, 3);
  const auto& lexicon = builtin_lexicon(SvlcType::kColor);
  std::size_t i = 0;
  for (auto _ : state) {
    CaptionRecord rec{"x", "img", captions[i++ % captions.size()]};
    Rng rng(i);
    benchmark::DoNotOptimize(rb_negative(rec, lexicon, rng));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RuleBasedNegative);

Matrix gaussian(std::size_t r, std::size_t c, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(r, c);
  for (double& v : m.data()) v = normal(gen);
  return m;
}

// Residual application at increasing rank versus the folded dense weight.
void BM_LoraResidual(benchmark::State& state) {
  const std::size_t m = 512, l = 512, r = static_cast<std::size_t>(state.range(0));
  lora::BaseWeight w{"w", lora::LayerKind::kLinear, gaussian(m, l, 1), {}};
  lora::LoraAdapter ad{"w", gaussian(m, r, 2), gaussian(r, l, 3)};
  std::vector<double> x(l, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(lora::apply_linear(w, &ad, x));
}
BENCHMARK(BM_LoraResidual)->Arg(1)->Arg(4)->Arg(16)->Arg(64);

void BM_LoraFolded(benchmark::State& state) {
  lora::BaseWeight w{"w", lora::LayerKind::kLinear, gaussian(512, 512, 1), {}};
  lora::LoraAdapter ad{"w", gaussian(512, 4, 2), gaussian(4, 512, 3)};
  auto folded = lora::fold(w, ad);
  std::vector<double> x(512, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(lora::apply_linear(folded, nullptr, x));
}
BENCHMARK(BM_LoraFolded);

void BM_LoraFold(benchmark::State& state) {
  lora::BaseWeight w{"w", lora::LayerKind::kLinear, gaussian(512, 512, 1), {}};
  lora::LoraAdapter ad{"w", gaussian(512, 4, 2), gaussian(4, 512, 3)};
  for (auto _ : state) benchmark::DoNotOptimize(lora::fold(w, ad));
}
BENCHMARK(BM_LoraFold)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
