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

#include "groundrl/reward.hpp"

#include <algorithm>
#include <cmath>

#include "groundrl/errors.hpp"

namespace groundrl::reward {

void RewardConfig::validate() const {
  if (!(alpha >= 0.0) || !(beta >= 0.0) || !(alpha + beta > 0.0)) {
    throw ConfigError("reward weights need alpha >= 0, beta >= 0, alpha + beta > 0");
  }
}

double normalized_distance(const Point& p, const BBox& b, const ScreenSize& s) {
  const double w = s.width;
  const double h = s.height;
  const double dx = p.x / w - (b.x1 + b.x2) / (2.0 * w);
  const double dy = p.y / h - (b.y1 + b.y2) / (2.0 * h);
  return std::sqrt(dx * dx + dy * dy);
}

double d_max(const BBox& b, const ScreenSize& s) {
  const double w = s.width;
  const double h = s.height;
  double best = 0.0;
  for (const Point corner : {Point{0.0, 0.0}, Point{w, 0.0}, Point{0.0, h}, Point{w, h}}) {
    best = std::max(best, normalized_distance(corner, b, s));
  }
  return best;
}

double point_reward(const std::optional<Point>& p, const BBox& b, const ScreenSize& s) {
  if (!p) return 0.0;
  // On screen d <= d_max. Off-screen clicks can exceed it; the base is held at
  // zero there so the reward stays in [0, 2] and keeps falling with distance.
  const double decay = std::max(0.0, 1.0 - normalized_distance(*p, b, s) / d_max(b, s));
  return (point_in_bbox(*p, b) ? 1.0 : 0.0) + decay * decay;
}

double sparse_point_reward(const std::optional<Point>& p, const BBox& b) {
  return (p && point_in_bbox(*p, b)) ? 1.0 : 0.0;
}

double response_reward(const Rollout& r, const BBox& gt, const ScreenSize& s,
                       const RewardConfig& cfg) {
  const std::optional<Point> point = r.format_valid ? r.point : std::nullopt;
  const double rp = cfg.mode == Mode::kDense ? point_reward(point, gt, s)
                                             : sparse_point_reward(point, gt);
  return combined_reward(format_reward(r.format_valid), rp, cfg);
}

}  // namespace groundrl::reward
