// Copyright 2026 The groundrl Authors
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

#include <vector>

#include "groundrl/attention.hpp"
#include "groundrl/grpo.hpp"
#include "groundrl/random.hpp"
#include "groundrl/reward.hpp"
#include "groundrl/synthgym.hpp"
#include "groundrl/trainer.hpp"

using namespace groundrl;

static void BM_PointReward(benchmark::State& state) {
  Rng rng(1);
  const BBox b{100, 200, 300, 260};
  const ScreenSize s{1920, 1080};
  std::vector<Point> pts(1024);
  for (auto& p : pts) p = {rng.uniform() * 1920, rng.uniform() * 1080};
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(reward::point_reward(pts[i++ & 1023], b, s));
}
BENCHMARK(BM_PointReward);

static void BM_GroupAdvantages(benchmark::State& state) {
  Rng rng(2);
  std::vector<double> r(static_cast<std::size_t>(state.range(0)));
  for (auto& v : r) v = rng.uniform();
  for (auto _ : state) benchmark::DoNotOptimize(grpo::group_advantages(r));
}
BENCHMARK(BM_GroupAdvantages)->Arg(8)->Arg(64);

static void BM_Gate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(3);
  Eigen::MatrixXd v(n, n);
  for (int k = 0; k < v.size(); ++k) v.data()[k] = rng.uniform();
  const attention::AttentionMap m(v);
  const BBox b{n * 0.25, n * 0.25, n * 0.75, n * 0.75};
  for (auto _ : state) benchmark::DoNotOptimize(attention::gate(m, b, 0.2));
}
BENCHMARK(BM_Gate)->Arg(16)->Arg(512);

static void BM_ToyAttention(benchmark::State& state) {
  const auto tasks = synth::generate_dataset(7, 1, synth::StandardDataset::config());
  const synth::GridPolicy p{Eigen::MatrixXd::Identity(8, 8) * 6.0, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(attention::toy_attention(p, tasks[0]));
}
BENCHMARK(BM_ToyAttention);

static void BM_TrainEpoch(benchmark::State& state) {
  const auto tasks = synth::generate_dataset(7, 500, synth::StandardDataset::config());
  const auto split = train::split_dataset(tasks);
  const std::vector<int> open(split.train.size(), 1);
  train::TrainConfig cfg;
  cfg.epochs = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(train::train_stage(synth::GridPolicy::Zero(8), split.train, open, cfg, {}));
  }
}
BENCHMARK(BM_TrainEpoch)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
