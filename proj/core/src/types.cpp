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

#include "groundrl/types.hpp"

#include <cmath>
#include <string>

#include "groundrl/errors.hpp"

namespace groundrl {

ScreenSize ScreenSize::Make(int width, int height) {
  if (width < 1 || height < 1) {
    throw DataError("screen size must be positive, got " +
                    std::to_string(width) + "x" + std::to_string(height));
  }
  return ScreenSize{width, height};
}

bool BBox::is_ordered() const {
  return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) &&
         std::isfinite(y2) && x1 <= x2 && y1 <= y2;
}

bool BBox::fits(const ScreenSize& screen) const {
  return is_ordered() && x1 >= 0.0 && y1 >= 0.0 && x2 <= screen.width &&
         y2 <= screen.height;
}

bool point_in_bbox(const Point& p, const BBox& b) {
  return b.x1 <= p.x && p.x <= b.x2 && b.y1 <= p.y && p.y <= b.y2;
}

const char* to_string(CurationFlag f) {
  switch (f) {
    case CurationFlag::kRegexPass:
      return "regex_pass";
    case CurationFlag::kInstructionScorePass:
      return "instr_score_pass";
    case CurationFlag::kBBoxScorePass:
      return "bbox_score_pass";
    case CurationFlag::kDifficultyPass:
      return "difficulty_pass";
  }
  return "unknown";
}

}  // namespace groundrl
