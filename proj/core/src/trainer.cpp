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

#include "groundrl/trainer.hpp"

#include <cmath>
#include <limits>

#include "groundrl/attention.hpp"
#include "groundrl/errors.hpp"
#include "groundrl/grpo.hpp"
#include "groundrl/parallel.hpp"
#include "groundrl/random.hpp"

namespace groundrl::train {
namespace {

std::uint64_t id_hash(std::string_view id) { return fnv1a64({id.data(), id.size()}); }

// Rollout group of one sample under the epoch snapshot.
struct Drawn {
  Eigen::VectorXd old_probs;
  std::vector<Rollout> rollouts;
  std::vector<double> rewards;
};

Drawn draw_group(const synth::GridPolicy& snapshot, const synth::Task& task,
                 const TrainConfig& cfg, std::uint64_t stream) {
  Drawn d;
  d.old_probs = synth::policy_distribution(snapshot, task.screen);
  Rng rng(stream);
  const reward::RewardConfig rc = cfg.reward_config();
  d.rollouts.reserve(cfg.group_size);
  d.rewards.reserve(cfg.group_size);
  for (int i = 0; i < cfg.group_size; ++i) {
    Rollout r = synth::sample_rollout(d.old_probs, task, rng, cfg.garble_prob);
    d.rewards.push_back(reward::response_reward(r, task.sample.gt_bbox, task.sample.screen, rc));
    d.rollouts.push_back(std::move(r));
  }
  return d;
}

}  // namespace

void TrainConfig::validate() const {
  reward_config().validate();
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma must be finite and >= 0");
  if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("tau must be in (0, 1)");
  if (group_size < 2) throw ConfigError("group_size must be >= 2");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate must be finite and > 0");
  }
  if (stages_max < 1) throw ConfigError("stages_max must be >= 1");
  if (!(convergence_eps >= 0.0)) throw ConfigError("convergence_eps must be >= 0");
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw ConfigError("temperature must be finite and > 0");
  }
  if (!(garble_prob >= 0.0 && garble_prob <= 1.0)) throw ConfigError("garble_prob must be in [0, 1]");
  if (workers < 1) throw ConfigError("workers must be >= 1");
}

bool is_held_out(std::string_view sample_id) { return id_hash(sample_id) % 5 == 0; }

Split split_dataset(const std::vector<synth::Task>& tasks) {
  Split s;
  for (const auto& t : tasks) (is_held_out(t.sample.id) ? s.eval : s.train).push_back(t);
  return s;
}

double evaluate(const synth::GridPolicy& policy, const std::vector<synth::Task>& tasks) {
  if (tasks.empty()) throw DataError("cannot evaluate on an empty dataset");
  std::size_t hits = 0;
  for (const auto& t : tasks) {
    const Point p = t.screen.cell_center(synth::greedy_cell(policy, t.screen));
    if (point_in_bbox(p, t.sample.gt_bbox)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(tasks.size());
}

std::vector<int> compute_gates(const synth::GridPolicy& prev_policy,
                               const std::vector<synth::Task>& tasks, double tau, int workers) {
  std::vector<int> gates(tasks.size(), 0);
  parallel_for(tasks.size(), workers, [&](std::size_t i) {
    const auto map = attention::toy_attention(prev_policy, tasks[i]);
    gates[i] = attention::gate(map, tasks[i].sample.gt_bbox, tau);
  });
  return gates;
}

synth::GridPolicy round_to_checkpoint(synth::GridPolicy policy) {
  policy.theta = policy.theta.cast<float>().cast<double>();
  if (!policy.theta.allFinite()) throw NumericError("policy parameters overflow float32");
  return policy;
}

StageResult train_stage(const synth::GridPolicy& init, const std::vector<synth::Task>& tasks,
                        const std::vector<int>& gates, const TrainConfig& cfg,
                        const std::vector<synth::Task>& eval, int stage_index) {
  cfg.validate();
  if (gates.size() != tasks.size()) throw ConfigError("gates and tasks differ in length");
  if (!init.theta.allFinite()) throw NumericError("initial policy has non-finite parameters");

  StageResult out;
  out.policy = init;
  out.policy.temperature = cfg.temperature;
  StageRecord& rec = out.record;
  rec.stage_index = stage_index;
  std::size_t kept = 0;
  for (int g : gates) kept += g != 0;
  rec.kept_fraction = tasks.empty() ? 0.0 : static_cast<double>(kept) / tasks.size();

  std::vector<std::uint64_t> keys(tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) keys[i] = id_hash(tasks[i].sample.id);

  std::vector<Drawn> drawn(tasks.size());
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const synth::GridPolicy snapshot = out.policy;
    parallel_for(tasks.size(), cfg.workers, [&](std::size_t i) {
      const std::uint64_t stream =
          derive_seed(cfg.seed, {static_cast<std::uint64_t>(stage_index),
                                 static_cast<std::uint64_t>(epoch), keys[i]});
      drawn[i] = draw_group(snapshot, tasks[i], cfg, stream);
    });

    double reward_sum = 0.0;
    std::size_t reward_count = 0;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      for (double r : drawn[i].rewards) reward_sum += r;
      reward_count += drawn[i].rewards.size();
      if (gates[i] == 0) continue;

      grpo::GroupBatch g;
      g.screen = &tasks[i].screen;
      g.rollouts = drawn[i].rollouts;
      g.advantages = grpo::group_advantages(drawn[i].rewards);
      g.old_probs = drawn[i].old_probs;
      g.keep = 1;
      const double loss = grpo::batch_loss(out.policy, {&g, 1}, cfg.gamma);
      if (!std::isfinite(loss)) {
        throw NumericError("non-finite loss at stage " + std::to_string(stage_index) + " epoch " +
                           std::to_string(epoch + 1) + " sample " + tasks[i].sample.id);
      }
      grpo::apply_update(out.policy, g, cfg.gamma, cfg.learning_rate);
      if (!out.policy.theta.allFinite()) {
        throw NumericError("non-finite parameters after update at stage " +
                           std::to_string(stage_index) + " epoch " + std::to_string(epoch + 1) +
                           " sample " + tasks[i].sample.id);
      }
    }
    rec.reward_curve.push_back(reward_count ? reward_sum / reward_count : 0.0);
    if (!eval.empty()) rec.eval_curve.push_back(evaluate(out.policy, eval));
  }

  rec.policy = round_to_checkpoint(out.policy);
  if (!eval.empty()) rec.eval_accuracy = evaluate(rec.policy, eval);
  return out;
}

EvolveResult self_evolve(const std::vector<synth::Task>& tasks, const TrainConfig& cfg) {
  cfg.validate();
  const Split split = split_dataset(tasks);
  if (split.train.empty() || split.eval.empty()) {
    throw DataError("dataset too small for the 80/20 split (train " +
                    std::to_string(split.train.size()) + ", held out " +
                    std::to_string(split.eval.size()) + ")");
  }
  const int f = split.train.front().screen.feature_dim();

  EvolveResult result;
  result.train_count = split.train.size();
  result.eval_count = split.eval.size();
  const std::vector<int> open(split.train.size(), 1);

  double best_acc = -1.0;
  for (int stage = 1; stage <= cfg.stages_max; ++stage) {
    synth::GridPolicy init = synth::GridPolicy::Zero(f, cfg.temperature);
    std::vector<int> gates = open;
    if (stage > 1) {
      init = result.stages[result.best_stage - 1].policy;
      if (cfg.gating) gates = compute_gates(init, split.train, cfg.tau, cfg.workers);
    }
    StageResult sr = train_stage(init, split.train, gates, cfg, split.eval, stage);
    const double acc = sr.record.eval_accuracy;
    result.stages.push_back(std::move(sr.record));
    if (stage == 1) {
      best_acc = acc;
      continue;
    }
    const double improvement = acc - best_acc;
    if (acc > best_acc) {
      best_acc = acc;
      result.best_stage = stage;
    }
    if (improvement < cfg.convergence_eps) break;
  }
  return result;
}

std::optional<int> epochs_to_reach(const std::vector<double>& curve, double threshold) {
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (curve[i] >= threshold) return static_cast<int>(i + 1);
  }
  return std::nullopt;
}

std::vector<AblationCell> run_ablation(const std::vector<synth::Task>& tasks,
                                       const TrainConfig& cfg) {
  std::vector<AblationCell> cells;
  for (const auto mode : {reward::Mode::kDense, reward::Mode::kSparse}) {
    for (const bool gating : {false, true}) {
      TrainConfig c = cfg;
      c.reward_mode = mode;
      c.gating = gating;
      if (!gating) c.stages_max = 1;
      AblationCell cell;
      cell.mode = mode;
      cell.gating = gating;
      cell.run = self_evolve(tasks, c);
      cell.epochs_to_threshold =
          epochs_to_reach(cell.run.stages.front().eval_curve, kAblationThreshold);
      cell.final_accuracy = cell.run.stages.back().eval_accuracy;
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

}  // namespace groundrl::train
