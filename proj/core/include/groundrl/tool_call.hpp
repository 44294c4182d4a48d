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

#ifndef GROUNDRL_TOOL_CALL_HPP_
#define GROUNDRL_TOOL_CALL_HPP_

#include <optional>
#include <string>
#include <string_view>

#include "groundrl/types.hpp"

namespace groundrl {

struct ParsedClick {
  std::optional<Point> point;
  bool format_valid = false;
};

// Extracts arguments.coordinate from a response that contains exactly one
// <tool_call>{...}</tool_call> block. Never throws; any deviation (missing or
// repeated tags, invalid JSON, missing or non-numeric coordinate) yields
// {nullopt, false}.
ParsedClick parse_click_point(std::string_view raw_text);

// Canonical computer_use click call for `p`. Coordinates are written with
// shortest round-trip precision, so parse_click_point recovers `p` exactly.
std::string render_click_point(const Point& p);

}  // namespace groundrl

#endif  // GROUNDRL_TOOL_CALL_HPP_
