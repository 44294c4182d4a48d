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

#ifndef GROUNDRL_TYPES_HPP_
#define GROUNDRL_TYPES_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

namespace groundrl {

struct ScreenSize {
  int width = 0;
  int height = 0;

  // Throws DataError unless width, height >= 1.
  static ScreenSize Make(int width, int height);

  bool operator==(const ScreenSize&) const = default;
};

// Predictions are never clamped to the screen.
struct Point {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point&) const = default;
};

// Closed axis-aligned box [x1, x2] x [y1, y2] in pixels.
struct BBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  Point center() const { return {(x1 + x2) / 2.0, (y1 + y2) / 2.0}; }

  // True when x1 <= x2, y1 <= y2 and all coordinates are finite.
  bool is_ordered() const;
  // is_ordered() and the box lies inside [0, W] x [0, H].
  bool fits(const ScreenSize& screen) const;

  bool operator==(const BBox&) const = default;
};

// Boundary counts as inside.
bool point_in_bbox(const Point& p, const BBox& b);

enum class CurationFlag : std::uint8_t {
  kRegexPass = 1u << 0,
  kInstructionScorePass = 1u << 1,
  kBBoxScorePass = 1u << 2,
  kDifficultyPass = 1u << 3,
};

class CurationFlags {
 public:
  constexpr CurationFlags() = default;

  constexpr bool has(CurationFlag f) const {
    return (bits_ & static_cast<std::uint8_t>(f)) != 0;
  }
  constexpr void set(CurationFlag f) { bits_ |= static_cast<std::uint8_t>(f); }
  constexpr std::uint8_t bits() const { return bits_; }

  bool operator==(const CurationFlags&) const = default;

 private:
  std::uint8_t bits_ = 0;
};

const char* to_string(CurationFlag f);

// Where the pixels of a sample come from. Synthetic screens carry their
// feature payload in SynthScreen (synthgym.hpp); this descriptor only names
// the origin.
struct SyntheticSource {
  int rows = 0;
  int cols = 0;
  bool operator==(const SyntheticSource&) const = default;
};
struct ImageSource {
  std::string path;
  bool operator==(const ImageSource&) const = default;
};
using ScreenSource = std::variant<SyntheticSource, ImageSource>;

struct Sample {
  std::string id;
  ScreenSize screen;
  ScreenSource source;
  std::string instruction;
  BBox gt_bbox;
  CurationFlags curation;
};

// One sampled response and the policy probabilities of the emitted action.
struct Rollout {
  std::string sample_id;
  std::string raw_text;
  std::optional<Point> point;
  bool format_valid = false;
  double logprob_new = 0.0;
  double logprob_old = 0.0;
  int action_index = -1;
};

}  // namespace groundrl

#endif  // GROUNDRL_TYPES_HPP_
