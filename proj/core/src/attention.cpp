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

#include "groundrl/attention.hpp"

#include <algorithm>
#include <cmath>

#include "groundrl/errors.hpp"

namespace groundrl::attention {

AttentionMap::AttentionMap(Eigen::MatrixXd values) : values_(std::move(values)) {}

AttentionMap project_grid(const Eigen::MatrixXd& grid, const ScreenSize& screen) {
  const int h = screen.height;
  const int w = screen.width;
  const auto rows = grid.rows();
  const auto cols = grid.cols();
  if (rows < 1 || cols < 1) throw ConfigError("attention grid is empty");

  // Pixel y takes the cell containing its center: floor((y + 0.5) * R / H),
  // in exact integer arithmetic.
  auto cell_of = [](long long px, long long cells, long long extent) {
    return static_cast<Eigen::Index>(((2 * px + 1) * cells) / (2 * extent));
  };
  std::vector<Eigen::Index> col_of(w);
  for (int x = 0; x < w; ++x) col_of[x] = cell_of(x, cols, w);
  Eigen::MatrixXd out(h, w);
  for (int y = 0; y < h; ++y) {
    const auto r = cell_of(y, rows, h);
    for (int x = 0; x < w; ++x) out(y, x) = grid(r, col_of[x]);
  }
  // Min-max over the pixels, so a screen smaller than the grid still spans [0, 1].
  const double lo = out.minCoeff();
  const double hi = out.maxCoeff();
  if (hi > lo) {
    out = (out.array() - lo) / (hi - lo);
  } else {
    out.setZero();
  }
  return AttentionMap(std::move(out));
}

AttentionMap aggregate_attention(const RawAttention& raw, const ScreenSize& screen) {
  if (raw.layers.empty()) throw ConfigError("attention has no layers");
  if (raw.grid_rows < 1 || raw.grid_cols < 1) throw ConfigError("vision grid must be positive");
  const Eigen::Index tokens = raw.layers.front().rows();
  const Eigen::Index width = raw.layers.front().cols();
  const int span = raw.vision_length();
  if (raw.vision_begin < 0 || raw.vision_begin + span > width) {
    throw ConfigError("vision token span does not fit the attention rows");
  }
  if (tokens < 1) throw ConfigError("attention has no generated tokens");

  Eigen::VectorXd acc = Eigen::VectorXd::Zero(span);
  for (const auto& layer : raw.layers) {
    if (layer.rows() != tokens || layer.cols() != width) {
      throw ConfigError("attention layers differ in shape");
    }
    if ((layer.array() < 0.0).any() || !layer.allFinite()) {
      throw ConfigError("attention weights must be finite and non-negative");
    }
    for (Eigen::Index t = 0; t < tokens; ++t) {
      const auto vision = layer.row(t).segment(raw.vision_begin, span);
      const double sum = vision.sum();
      if (sum > 0.0) acc += vision.transpose() / sum;
    }
  }
  acc /= static_cast<double>(raw.layers.size() * tokens);

  Eigen::MatrixXd grid(raw.grid_rows, raw.grid_cols);
  for (int r = 0; r < raw.grid_rows; ++r) {
    for (int c = 0; c < raw.grid_cols; ++c) grid(r, c) = acc(r * raw.grid_cols + c);
  }
  return project_grid(grid, screen);
}

PixelRect covered_pixels(const BBox& b, int map_width, int map_height) {
  PixelRect r;
  r.x_lo = std::max(0, static_cast<int>(std::ceil(b.x1 - 0.5)));
  r.x_hi = std::min(map_width - 1, static_cast<int>(std::floor(b.x2 - 0.5)));
  r.y_lo = std::max(0, static_cast<int>(std::ceil(b.y1 - 0.5)));
  r.y_hi = std::min(map_height - 1, static_cast<int>(std::floor(b.y2 - 0.5)));
  return r;
}

bool p_peak(const AttentionMap& m, const BBox& b, double tau) {
  const PixelRect r = covered_pixels(b, m.width(), m.height());
  if (r.empty()) return false;
  return m.values().block(r.y_lo, r.x_lo, r.y_hi - r.y_lo + 1, r.x_hi - r.x_lo + 1).maxCoeff() > tau;
}

bool p_global(const AttentionMap& m, const BBox& b) {
  const PixelRect r = covered_pixels(b, m.width(), m.height());
  if (r.empty()) return false;
  const double region =
      m.values().block(r.y_lo, r.x_lo, r.y_hi - r.y_lo + 1, r.x_hi - r.x_lo + 1).mean();
  return region > m.values().mean();
}

int gate(const AttentionMap& m, const BBox& b, double tau) {
  return (p_peak(m, b, tau) && p_global(m, b)) ? 1 : 0;
}

AttentionMap toy_attention(const synth::GridPolicy& policy, const synth::Task& task) {
  const auto& s = task.screen;
  const Eigen::VectorXd probs = synth::policy_distribution(policy, s);
  Eigen::MatrixXd grid(s.rows, s.cols);
  for (int k = 0; k < s.num_cells(); ++k) grid(k / s.cols, k % s.cols) = probs(k);
  return project_grid(grid, s.screen);
}

}  // namespace groundrl::attention
