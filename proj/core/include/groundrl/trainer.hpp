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

#ifndef GROUNDRL_TRAINER_HPP_
#define GROUNDRL_TRAINER_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "groundrl/reward.hpp"
#include "groundrl/synthgym.hpp"

namespace groundrl::train {

struct TrainConfig {
  double alpha = 1.0;
  double beta = 2.0;
  double gamma = 0.004;
  double tau = 0.2;
  int group_size = 8;
  int epochs = 10;
  double learning_rate = 3.0;
  int stages_max = 4;
  double convergence_eps = 0.005;
  std::uint64_t seed = 0;
  reward::Mode reward_mode = reward::Mode::kDense;
  bool gating = true;
  double temperature = 1.0;
  double garble_prob = synth::kDefaultGarbleProb;
  // Parallel rollout/gate workers. Results never depend on it.
  int workers = 1;

  reward::RewardConfig reward_config() const { return {alpha, beta, reward_mode}; }
  // Throws ConfigError on out-of-range values.
  void validate() const;
};

// key = value lines; '#' starts a comment. Keys are the field names above,
// reward_mode takes dense|sparse and gating on|off. Unknown keys, repeated
// keys and unparsable values throw ConfigError naming the line.
TrainConfig parse_config(std::istream& in, std::string_view name, TrainConfig base = {});
TrainConfig load_config_file(const std::string& path, TrainConfig base = {});
// Applies one "key=value" override.
void set_config_value(TrainConfig& cfg, std::string_view key, std::string_view value);
// Canonical key=value text, one line per field, workers excluded.
std::string config_to_text(const TrainConfig& cfg);

struct StageRecord {
  int stage_index = 1;
  double kept_fraction = 1.0;
  std::vector<double> reward_curve;  // epoch-mean combined reward
  std::vector<double> eval_curve;    // held-out accuracy after each epoch
  double eval_accuracy = 0.0;        // held-out accuracy of `policy`
  synth::GridPolicy policy;          // rounded to checkpoint precision
};

// Deterministic 80/20 split on fnv1a64(id) % 5 == 0 (held out).
bool is_held_out(std::string_view sample_id);
struct Split {
  std::vector<synth::Task> train;
  std::vector<synth::Task> eval;
};
Split split_dataset(const std::vector<synth::Task>& tasks);

// Fraction of tasks whose greedy cell center lies in the ground-truth box.
// Throws DataError on an empty set.
double evaluate(const synth::GridPolicy& policy, const std::vector<synth::Task>& tasks);

// gate_i from the toy attention map of `prev_policy` on task i.
std::vector<int> compute_gates(const synth::GridPolicy& prev_policy,
                               const std::vector<synth::Task>& tasks, double tau,
                               int workers = 1);

// Rounds every parameter to float, the precision checkpoints store. Throws
// NumericError when a parameter overflows float.
synth::GridPolicy round_to_checkpoint(synth::GridPolicy policy);

struct StageResult {
  synth::GridPolicy policy;  // full precision
  StageRecord record;
};

// One self-evolution stage. Each epoch snapshots the policy as pi_old, draws
// group_size rollouts per sample from the snapshot (in parallel, one rng
// stream per (seed, stage, epoch, sample id)), then applies one update per
// kept sample in dataset order. `eval` may be empty, leaving the curves and
// accuracy at zero. Throws ConfigError when gates and tasks differ in length
// and NumericError on a non-finite loss or parameter.
StageResult train_stage(const synth::GridPolicy& init, const std::vector<synth::Task>& tasks,
                        const std::vector<int>& gates, const TrainConfig& cfg,
                        const std::vector<synth::Task>& eval, int stage_index = 1);

struct EvolveResult {
  std::vector<StageRecord> stages;
  int best_stage = 1;  // 1-based
  std::size_t train_count = 0;
  std::size_t eval_count = 0;
};

// Stage 1 trains from theta = 0 with all gates open. Stage s >= 2 starts from
// the best held-out policy so far and, with gating on, takes its gates from
// that policy. Stops once a stage improves the best accuracy by less than
// convergence_eps, or after stages_max stages.
EvolveResult self_evolve(const std::vector<synth::Task>& tasks, const TrainConfig& cfg);

struct AblationCell {
  reward::Mode mode = reward::Mode::kDense;
  bool gating = false;
  EvolveResult run;
  // First epoch (1-based) of stage 1 whose held-out accuracy reaches 0.8.
  std::optional<int> epochs_to_threshold;
  double final_accuracy = 0.0;  // last recorded stage
};

inline constexpr double kAblationThreshold = 0.8;

// {dense, sparse} x {gating off, on}. Gating off is a single GRPO stage;
// gating on is the full self-evolution schedule.
std::vector<AblationCell> run_ablation(const std::vector<synth::Task>& tasks,
                                       const TrainConfig& cfg);
std::optional<int> epochs_to_reach(const std::vector<double>& curve, double threshold);

// ---- artifacts ----------------------------------------------------------

std::string stage_record_json(const StageRecord& r, const std::string& checkpoint_name);
std::string evolve_json(const EvolveResult& r, const TrainConfig& cfg,
                        const std::vector<std::string>& checkpoint_names);
// stage,epoch,mean_reward,eval_accuracy
std::string reward_curve_csv(const std::vector<StageRecord>& stages);
std::string ablation_table(const std::vector<AblationCell>& cells);
std::string ablation_json(const std::vector<AblationCell>& cells);

// JSON header line {"format":"groundrl-policy","version":1,"rows":F,
// "cols":F,"temperature":T,"dtype":"f32le"} then F*F little-endian floats,
// row-major.
void write_checkpoint(std::ostream& out, const synth::GridPolicy& policy);
void write_checkpoint_file(const std::string& path, const synth::GridPolicy& policy);
synth::GridPolicy read_checkpoint(std::istream& in);
synth::GridPolicy read_checkpoint_file(const std::string& path);

}  // namespace groundrl::train

#endif  // GROUNDRL_TRAINER_HPP_
