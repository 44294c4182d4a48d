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

#ifndef GROUNDRL_GRPO_HPP_
#define GROUNDRL_GRPO_HPP_

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "groundrl/synthgym.hpp"
#include "groundrl/types.hpp"

namespace groundrl::grpo {

// A_i = (r_i - mean) / std with the population standard deviation. A group
// whose rewards are all identical carries no signal and yields all zeros.
// Throws ConfigError when fewer than two rewards are given.
std::vector<double> group_advantages(std::span<const double> rewards);

// Exact KL[p_old || p_new] = sum_k p_old(k) ln(p_old(k) / p_new(k)).
// Throws ConfigError if either input is not a distribution (sum off by more
// than 1e-9, negative entries, size mismatch) or p_new vanishes where p_old
// has mass.
double categorical_kl(std::span<const double> p_old, std::span<const double> p_new);

// Single-sample estimator ratio - 1 - ln(ratio) with ratio = pi_old / pi_new,
// for callers that only see the sampled action's log-probabilities.
double k3_kl_estimate(double logprob_old, double logprob_new);

// keep * ( -exp(logprob_new - logprob_old) * advantage + gamma * kl ).
double rollout_loss(const Rollout& r, double advantage, double kl, int keep, double gamma);

// Mean of rollout_loss over the group. Throws ConfigError on length mismatch.
double group_loss(std::span<const Rollout> rollouts, std::span<const double> advantages,
                  double kl, int keep, double gamma);

// One sample's group as consumed by the toy-policy objective. `old_probs` is
// the full distribution of the policy that generated the rollouts.
struct GroupBatch {
  const synth::SynthScreen* screen = nullptr;
  std::vector<Rollout> rollouts;
  std::vector<double> advantages;
  Eigen::VectorXd old_probs;
  int keep = 1;
};

// Mean over groups of group_loss evaluated at `policy`: ratios and the KL
// term are recomputed from policy.theta, stored logprob_new values are
// ignored.
double batch_loss(const synth::GridPolicy& policy, std::span<const GroupBatch> batch,
                  double gamma);

// d batch_loss / d theta, via the softmax chain rule
//   dL/dz = keep * [ -(1/N) sum_i A_i rho_i (e_{a_i} - p) + gamma (p - p_old) ]
//   dL/dtheta = (1/T) * instruction * (features' dL/dz)'
Eigen::MatrixXd loss_gradient(const synth::GridPolicy& policy, std::span<const GroupBatch> batch,
                              double gamma);

// One optimizer step on a single group. The ratio-advantage term is taken
// explicitly; the KL term is linearly implicit:
//   theta <- theta - lr * (I + lr * gamma * H_kl)^-1 * grad
// where H_kl is the exact Hessian of KL[p_old || p_theta] at the current
// theta. For gamma = 0 this is plain gradient descent; for large gamma it
// stays stable while the KL gradient is still zero at the snapshot policy.
// Returns the applied parameter change.
Eigen::MatrixXd apply_update(synth::GridPolicy& policy, const GroupBatch& group, double gamma,
                             double learning_rate);

}  // namespace groundrl::grpo

#endif  // GROUNDRL_GRPO_HPP_
