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

#ifndef GROUNDRL_REWARD_HPP_
#define GROUNDRL_REWARD_HPP_

#include <optional>

#include "groundrl/types.hpp"

namespace groundrl::reward {

enum class Mode { kDense, kSparse };

struct RewardConfig {
  double alpha = 1.0;  // format weight
  double beta = 2.0;   // point weight
  Mode mode = Mode::kDense;

  // Throws ConfigError unless alpha, beta >= 0 and alpha + beta > 0.
  void validate() const;
};

// Screen-normalized Euclidean distance from `p` to the center of `b`: each
// axis is divided by its own screen dimension.
double normalized_distance(const Point& p, const BBox& b, const ScreenSize& s);

// Largest normalized distance from the center of `b` to a screen corner.
// Always in (0, sqrt(2)] for a box inside the screen.
double d_max(const BBox& b, const ScreenSize& s);

// Dense point reward in [0, 2]:
//   inside b (closed):  1 + max(0, 1 - d / d_max)^2
//   otherwise:              max(0, 1 - d / d_max)^2
//   no point:           0
double point_reward(const std::optional<Point>& p, const BBox& b, const ScreenSize& s);

// 1 iff a point is present and inside b.
double sparse_point_reward(const std::optional<Point>& p, const BBox& b);

inline double format_reward(bool format_valid) { return format_valid ? 1.0 : 0.0; }

inline double combined_reward(double format_r, double point_r, const RewardConfig& cfg) {
  return cfg.alpha * format_r + cfg.beta * point_r;
}

// Full response reward for `r` against the sample's ground truth, using the
// dense or sparse point term selected by cfg.mode.
double response_reward(const Rollout& r, const BBox& gt, const ScreenSize& s,
                       const RewardConfig& cfg);

}  // namespace groundrl::reward

#endif  // GROUNDRL_REWARD_HPP_
