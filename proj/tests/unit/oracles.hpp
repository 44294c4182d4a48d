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

// Independent reference implementations used as test oracles. They are
// written directly from the formulas with plain loops and share no code
// with the library beyond the value types.
#ifndef GROUNDRL_TESTS_ORACLES_HPP_
#define GROUNDRL_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

inline double point_reward(bool present, double px, double py, double x1, double y1, double x2,
                           double y2, double w, double h) {
  if (!present) return 0.0;
  const double cx = 0.5 * (x1 + x2) / w;
  const double cy = 0.5 * (y1 + y2) / h;
  const double d = std::sqrt((px / w - cx) * (px / w - cx) + (py / h - cy) * (py / h - cy));
  double dmax = 0.0;
  const double corners[4][2] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  for (const auto& c : corners) {
    dmax = std::max(dmax, std::sqrt((c[0] - cx) * (c[0] - cx) + (c[1] - cy) * (c[1] - cy)));
  }
  double base = 1.0 - d / dmax;
  if (base < 0.0) base = 0.0;
  const bool inside = x1 <= px && px <= x2 && y1 <= py && py <= y2;
  return (inside ? 1.0 : 0.0) + base * base;
}

inline std::vector<double> advantages(const std::vector<double>& r) {
  const double n = static_cast<double>(r.size());
  double mean = 0.0;
  for (double v : r) mean += v / n;
  double var = 0.0;
  for (double v : r) var += (v - mean) * (v - mean) / n;
  std::vector<double> a(r.size(), 0.0);
  if (var == 0.0) return a;
  for (std::size_t i = 0; i < r.size(); ++i) a[i] = (r[i] - mean) / std::sqrt(var);
  return a;
}

// Row-major h x w map.
struct Map {
  int h = 0, w = 0;
  std::vector<double> v;
  double at(int row, int col) const { return v[static_cast<std::size_t>(row) * w + col]; }
};

inline bool pixel_in_box(int row, int col, double x1, double y1, double x2, double y2) {
  const double cx = col + 0.5, cy = row + 0.5;
  return x1 <= cx && cx <= x2 && y1 <= cy && cy <= y2;
}

inline bool p_peak(const Map& m, double x1, double y1, double x2, double y2, double tau) {
  bool any = false;
  double best = -1.0;
  for (int r = 0; r < m.h; ++r)
    for (int c = 0; c < m.w; ++c)
      if (pixel_in_box(r, c, x1, y1, x2, y2)) {
        any = true;
        best = std::max(best, m.at(r, c));
      }
  return any && best > tau;
}

inline bool p_global(const Map& m, double x1, double y1, double x2, double y2) {
  double in_sum = 0.0, all_sum = 0.0;
  long in_n = 0;
  for (int r = 0; r < m.h; ++r)
    for (int c = 0; c < m.w; ++c) {
      all_sum += m.at(r, c);
      if (pixel_in_box(r, c, x1, y1, x2, y2)) {
        in_sum += m.at(r, c);
        ++in_n;
      }
    }
  if (in_n == 0) return false;
  return in_sum / in_n > all_sum / (static_cast<double>(m.h) * m.w);
}

inline int gate(const Map& m, double x1, double y1, double x2, double y2, double tau) {
  return p_peak(m, x1, y1, x2, y2, tau) && p_global(m, x1, y1, x2, y2) ? 1 : 0;
}

// Four-step aggregation: per-token vision renormalization, mean over layers
// and tokens, nearest-neighbour upsampling, min-max normalization.
// attn[l][t][k] over all tokens.
inline Map aggregate(const std::vector<std::vector<std::vector<double>>>& attn, int begin, int rows,
                     int cols, int h, int w) {
  std::vector<double> grid(static_cast<std::size_t>(rows) * cols, 0.0);
  double count = 0.0;
  for (const auto& layer : attn) {
    for (const auto& tok : layer) {
      double s = 0.0;
      for (int k = 0; k < rows * cols; ++k) s += tok[begin + k];
      for (int k = 0; k < rows * cols; ++k) grid[k] += s > 0 ? tok[begin + k] / s : 0.0;
      count += 1.0;
    }
  }
  for (double& g : grid) g /= count;
  Map m{h, w, std::vector<double>(static_cast<std::size_t>(h) * w)};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const int r = static_cast<int>(std::floor((y + 0.5) * rows / h));
      const int c = static_cast<int>(std::floor((x + 0.5) * cols / w));
      m.v[static_cast<std::size_t>(y) * w + x] = grid[static_cast<std::size_t>(r) * cols + c];
    }
  const double lo = *std::min_element(m.v.begin(), m.v.end());
  const double hi = *std::max_element(m.v.begin(), m.v.end());
  for (double& v : m.v) v = hi > lo ? (v - lo) / (hi - lo) : 0.0;
  return m;
}

inline std::vector<double> softmax(const std::vector<double>& z) {
  double mx = z[0];
  for (double v : z) mx = std::max(mx, v);
  std::vector<double> p(z.size());
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) s += (p[i] = std::exp(z[i] - mx));
  for (double& v : p) v /= s;
  return p;
}

}  // namespace oracle

#endif  // GROUNDRL_TESTS_ORACLES_HPP_
