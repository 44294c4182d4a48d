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

#ifndef GROUNDRL_SYNTHGYM_HPP_
#define GROUNDRL_SYNTHGYM_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "groundrl/dataset_io.hpp"
#include "groundrl/random.hpp"
#include "groundrl/types.hpp"

namespace groundrl::synth {

// Synthetic grounding screens: an R x C grid of cells, each described by an
// F-dimensional feature vector. Clean features are a unit-norm positional
// code (cos/sin pairs of row and column at random per-screen frequencies),
// so feature similarity decays smoothly with on-screen distance. The
// instruction is the target's clean vector; observed cell features add
// N(0, sigma^2) noise per component.
struct SynthConfig {
  int rows = 8;
  int cols = 8;
  int feature_dim = 8;
  ScreenSize screen{512, 512};
  double sigma = 0.005;
  // Probability that a sample's ground-truth box is moved to a uniformly
  // chosen wrong cell (annotation noise, the failure mode the attention gate
  // screens out).
  double annotation_noise = 0.0;

  // Throws ConfigError on non-positive sizes, odd feature_dim, negative sigma
  // or annotation_noise outside [0, 1].
  void validate() const;
};

// The seed-7 / 500-sample / 8x8 configuration used by the ablation checks.
struct StandardDataset {
  static constexpr std::uint64_t kSeed = 7;
  static constexpr int kCount = 500;
  static SynthConfig config();
};

struct SynthScreen {
  ScreenSize screen;
  int rows = 0;
  int cols = 0;
  Eigen::MatrixXd cell_features;  // (rows*cols) x F, observed
  Eigen::VectorXd instruction;    // F
  int target_cell = 0;
  double distractor_noise = 0.0;
  bool annotation_noise = false;

  int num_cells() const { return rows * cols; }
  int feature_dim() const { return static_cast<int>(instruction.size()); }
  BBox cell_bbox(int cell) const;
  Point cell_center(int cell) const;
};

struct Task {
  Sample sample;
  SynthScreen screen;
};

// Deterministic in (seed, count, cfg). Sample ids are "synth-<seed>-<index>".
std::vector<Task> generate_dataset(std::uint64_t seed, int count, const SynthConfig& cfg);

// The instruction text carries the target signature as a bracketed list
// written with round-trip precision.
std::string encode_instruction(const Eigen::VectorXd& signature);
Eigen::VectorXd decode_instruction(const std::string& text);

io::Record to_record(const Task& task);
// Throws DataError for non-synthetic records or inconsistent payloads.
Task task_from_record(const io::Record& record);
std::vector<Task> tasks_from_records(const std::vector<io::Record>& records);

// Bilinear cell scorer: logit_k = instruction' * theta * features_k / temperature.
struct GridPolicy {
  Eigen::MatrixXd theta;
  double temperature = 1.0;

  static GridPolicy Zero(int feature_dim, double temperature = 1.0);
  int feature_dim() const { return static_cast<int>(theta.rows()); }
};

Eigen::VectorXd policy_logits(const GridPolicy& policy, const SynthScreen& screen);
// Softmax of policy_logits; throws ConfigError on dimension mismatch.
Eigen::VectorXd policy_distribution(const GridPolicy& policy, const SynthScreen& screen);
// Lowest-index argmax of the logits.
int greedy_cell(const GridPolicy& policy, const SynthScreen& screen);

inline constexpr double kDefaultGarbleProb = 0.02;

// Samples a cell from `probs` (the generating policy's distribution) and
// renders a click at its center. With probability garble_prob emits a
// malformed call instead. Both uniforms are always drawn so rng consumption
// does not depend on the outcome.
Rollout sample_rollout(const Eigen::VectorXd& probs, const Task& task, Rng& rng,
                       double garble_prob = kDefaultGarbleProb);
Rollout sample_rollout(const GridPolicy& policy, const Task& task, Rng& rng,
                       double garble_prob = kDefaultGarbleProb);

}  // namespace groundrl::synth

#endif  // GROUNDRL_SYNTHGYM_HPP_
