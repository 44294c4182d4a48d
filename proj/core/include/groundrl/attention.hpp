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

#ifndef GROUNDRL_ATTENTION_HPP_
#define GROUNDRL_ATTENTION_HPP_

#include <Eigen/Dense>
#include <vector>

#include "groundrl/synthgym.hpp"
#include "groundrl/types.hpp"

namespace groundrl::attention {

// Decoder self-attention for one response: per layer a
// (generated tokens) x (all tokens) weight matrix. Columns
// [vision_begin, vision_begin + grid_rows * grid_cols) are the visual tokens,
// laid out row-major over the vision grid.
struct RawAttention {
  std::vector<Eigen::MatrixXd> layers;
  int vision_begin = 0;
  int grid_rows = 0;
  int grid_cols = 0;

  int vision_length() const { return grid_rows * grid_cols; }
};

// Screen-resolution map with values in [0, 1]. Row index is y, column is x.
class AttentionMap {
 public:
  AttentionMap() = default;
  explicit AttentionMap(Eigen::MatrixXd values);

  int height() const { return static_cast<int>(values_.rows()); }
  int width() const { return static_cast<int>(values_.cols()); }
  double at(int x, int y) const { return values_(y, x); }
  const Eigen::MatrixXd& values() const { return values_; }

 private:
  Eigen::MatrixXd values_;
};

// Nearest-neighbour upsampling of an R x C grid to the screen (each pixel
// takes the cell containing its center) followed by min-max normalization;
// a constant grid becomes all zeros.
AttentionMap project_grid(const Eigen::MatrixXd& grid, const ScreenSize& screen);

// 1. per layer and generated token, keep the vision span and renormalize it
//    to sum 1 (all-zero rows stay zero);
// 2. average over layers and tokens into an R x C grid;
// 3-4. project_grid.
// Throws ConfigError on span/grid mismatch, ragged layers or negative weights.
AttentionMap aggregate_attention(const RawAttention& raw, const ScreenSize& screen);

// Integer pixels (x, y) whose centers (x + 0.5, y + 0.5) lie in the closed box,
// clipped to the map. Empty when lo > hi on either axis.
struct PixelRect {
  int x_lo = 0, x_hi = -1, y_lo = 0, y_hi = -1;
  bool empty() const { return x_lo > x_hi || y_lo > y_hi; }
  long long count() const {
    return empty() ? 0 : static_cast<long long>(x_hi - x_lo + 1) * (y_hi - y_lo + 1);
  }
};
PixelRect covered_pixels(const BBox& b, int map_width, int map_height);

// Max of the map over the box pixels is strictly above tau.
bool p_peak(const AttentionMap& m, const BBox& b, double tau);
// Mean over the box pixels is strictly above the mean over the whole map.
bool p_global(const AttentionMap& m, const BBox& b);
// 1 iff p_peak and p_global; boxes covering no pixel give 0.
int gate(const AttentionMap& m, const BBox& b, double tau);

// Cell-probability map of a toy policy, rendered like step 3-4 above.
AttentionMap toy_attention(const synth::GridPolicy& policy, const synth::Task& task);

}  // namespace groundrl::attention

#endif  // GROUNDRL_ATTENTION_HPP_
