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

#include "groundrl/tool_call.hpp"

#include <cmath>

#include "json.hpp"

namespace groundrl {
namespace {

constexpr std::string_view kOpenTag = "<tool_call>";
constexpr std::string_view kCloseTag = "</tool_call>";

std::size_t count_occurrences(std::string_view text, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string_view::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

}  // namespace

ParsedClick parse_click_point(std::string_view raw_text) {
  if (count_occurrences(raw_text, kOpenTag) != 1 ||
      count_occurrences(raw_text, kCloseTag) != 1) {
    return {};
  }
  const auto open = raw_text.find(kOpenTag);
  const auto close = raw_text.find(kCloseTag);
  if (close < open) return {};

  const auto body = raw_text.substr(open + kOpenTag.size(),
                                    close - open - kOpenTag.size());
  const auto doc = nlohmann::json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) return {};

  const auto args = doc.find("arguments");
  if (args == doc.end() || !args->is_object()) return {};
  const auto coord = args->find("coordinate");
  if (coord == args->end() || !coord->is_array() || coord->size() != 2) {
    return {};
  }
  const auto& cx = (*coord)[0];
  const auto& cy = (*coord)[1];
  if (!cx.is_number() || !cy.is_number()) return {};

  const Point p{cx.get<double>(), cy.get<double>()};
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) return {};
  return {p, true};
}

std::string render_click_point(const Point& p) {
  nlohmann::ordered_json call;
  call["name"] = "computer_use";
  call["arguments"]["action"] = "click";
  call["arguments"]["coordinate"] = {p.x, p.y};
  return std::string(kOpenTag) + call.dump() + std::string(kCloseTag);
}

}  // namespace groundrl
