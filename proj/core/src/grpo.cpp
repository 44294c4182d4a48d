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

#include "groundrl/grpo.hpp"

#include <algorithm>
#include <cmath>

#include "groundrl/errors.hpp"

namespace groundrl::grpo {
namespace {

void check_distribution(std::span<const double> p, const char* what) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string(what) + " has a negative or non-finite entry");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError(std::string(what) + " does not sum to 1");
  }
}

// Logit-space gradient of one group's loss at current probabilities `p`.
Eigen::VectorXd logit_gradient(const GroupBatch& g, const Eigen::VectorXd& p, double gamma) {
  Eigen::VectorXd dz = Eigen::VectorXd::Zero(p.size());
  if (g.keep == 0) return dz;
  const double inv_n = 1.0 / static_cast<double>(g.rollouts.size());
  for (std::size_t i = 0; i < g.rollouts.size(); ++i) {
    const int a = g.rollouts[i].action_index;
    const double ratio = p(a) / g.old_probs(a);
    const double w = -g.advantages[i] * ratio * inv_n;
    dz -= w * p;
    dz(a) += w;
  }
  dz += gamma * (p - g.old_probs);
  return dz;
}

void check_group(const synth::GridPolicy& policy, const GroupBatch& g) {
  if (!g.screen) throw ConfigError("group has no screen");
  if (g.rollouts.size() != g.advantages.size() || g.rollouts.empty()) {
    throw ConfigError("rollouts and advantages differ in length");
  }
  if (g.old_probs.size() != g.screen->num_cells()) {
    throw ConfigError("old distribution size differs from the number of cells");
  }
  if (policy.feature_dim() != g.screen->feature_dim()) {
    throw ConfigError("policy dimensions do not match the screen features");
  }
}

}  // namespace

std::vector<double> group_advantages(std::span<const double> rewards) {
  const std::size_t n = rewards.size();
  if (n < 2) throw ConfigError("group advantages need at least two rewards");
  std::vector<double> out(n, 0.0);
  if (std::all_of(rewards.begin(), rewards.end(),
                  [&](double r) { return r == rewards.front(); })) {
    return out;
  }
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  const double std = std::sqrt(var / static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) out[i] = (rewards[i] - mean) / std;
  return out;
}

double categorical_kl(std::span<const double> p_old, std::span<const double> p_new) {
  if (p_old.size() != p_new.size()) throw ConfigError("KL inputs differ in size");
  check_distribution(p_old, "p_old");
  check_distribution(p_new, "p_new");
  double kl = 0.0;
  for (std::size_t k = 0; k < p_old.size(); ++k) {
    if (p_old[k] == 0.0) continue;
    if (p_new[k] <= 0.0) throw ConfigError("p_new has no mass where p_old does");
    kl += p_old[k] * std::log(p_old[k] / p_new[k]);
  }
  return std::max(0.0, kl);
}

double k3_kl_estimate(double logprob_old, double logprob_new) {
  const double log_ratio = logprob_old - logprob_new;
  return std::exp(log_ratio) - 1.0 - log_ratio;
}

double rollout_loss(const Rollout& r, double advantage, double kl, int keep, double gamma) {
  if (keep == 0) return 0.0;
  return -std::exp(r.logprob_new - r.logprob_old) * advantage + gamma * kl;
}

double group_loss(std::span<const Rollout> rollouts, std::span<const double> advantages,
                  double kl, int keep, double gamma) {
  if (rollouts.size() != advantages.size()) {
    throw ConfigError("rollouts and advantages differ in length");
  }
  if (keep == 0 || rollouts.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < rollouts.size(); ++i) {
    sum += rollout_loss(rollouts[i], advantages[i], kl, keep, gamma);
  }
  return sum / static_cast<double>(rollouts.size());
}

double batch_loss(const synth::GridPolicy& policy, std::span<const GroupBatch> batch,
                  double gamma) {
  if (batch.empty()) return 0.0;
  double total = 0.0;
  for (const auto& g : batch) {
    check_group(policy, g);
    if (g.keep == 0) continue;
    const Eigen::VectorXd p = synth::policy_distribution(policy, *g.screen);
    std::vector<Rollout> current = g.rollouts;
    for (auto& r : current) {
      r.logprob_old = std::log(g.old_probs(r.action_index));
      r.logprob_new = std::log(p(r.action_index));
    }
    const double kl = categorical_kl({g.old_probs.data(), static_cast<std::size_t>(g.old_probs.size())},
                                     {p.data(), static_cast<std::size_t>(p.size())});
    total += group_loss(current, g.advantages, kl, g.keep, gamma);
  }
  return total / static_cast<double>(batch.size());
}

Eigen::MatrixXd loss_gradient(const synth::GridPolicy& policy, std::span<const GroupBatch> batch,
                              double gamma) {
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(policy.theta.rows(), policy.theta.cols());
  if (batch.empty()) return grad;
  for (const auto& g : batch) {
    check_group(policy, g);
    if (g.keep == 0) continue;
    const Eigen::VectorXd p = synth::policy_distribution(policy, *g.screen);
    const Eigen::VectorXd dz = logit_gradient(g, p, gamma);
    const Eigen::VectorXd v = g.screen->cell_features.transpose() * dz;
    grad.noalias() += g.screen->instruction * v.transpose() / policy.temperature;
  }
  return grad / static_cast<double>(batch.size());
}

Eigen::MatrixXd apply_update(synth::GridPolicy& policy, const GroupBatch& g, double gamma,
                             double learning_rate) {
  check_group(policy, g);
  const int f = policy.feature_dim();
  if (g.keep == 0) return Eigen::MatrixXd::Zero(f, f);

  const auto& feats = g.screen->cell_features;
  const Eigen::VectorXd& x = g.screen->instruction;
  const double t = policy.temperature;
  const Eigen::VectorXd p = synth::policy_distribution(policy, *g.screen);
  const Eigen::VectorXd v = feats.transpose() * logit_gradient(g, p, gamma);

  // The gradient is x v' / T. The KL Hessian in theta is
  // (x x' / T^2) (kron) (F' (diag p - p p') F), so the implicit solve only
  // acts on v through an F x F system.
  Eigen::VectorXd step_v = v;
  if (gamma > 0.0) {
    const Eigen::VectorXd mean_feat = feats.transpose() * p;
    Eigen::MatrixXd cov = feats.transpose() * p.asDiagonal() * feats;
    cov.noalias() -= mean_feat * mean_feat.transpose();
    const double c = learning_rate * gamma * x.squaredNorm() / (t * t);
    Eigen::MatrixXd system = Eigen::MatrixXd::Identity(f, f) + c * cov;
    step_v = system.ldlt().solve(v);
  }
  const Eigen::MatrixXd delta = -learning_rate * x * step_v.transpose() / t;
  policy.theta += delta;
  return delta;
}

}  // namespace groundrl::grpo
