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

#ifndef GROUNDRL_EVALKIT_HPP_
#define GROUNDRL_EVALKIT_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "groundrl/dataset_io.hpp"
#include "groundrl/types.hpp"

namespace groundrl::eval {

// Records without a category or elem_type are grouped under this key.
inline constexpr std::string_view kNoTag = "(none)";

// Line-numbered DataError on the first malformed record.
std::vector<io::Record> load_benchmark(const std::string& path);

// id -> predicted point. JSONL lines are {"id": str, "point": [x, y]} or
// {"id": str, "response": str}; a response is parsed as a tool call and
// contributes no prediction when malformed. Duplicate ids are a DataError.
using Predictions = std::map<std::string, Point>;
Predictions read_predictions(std::istream& in, std::string_view name);
Predictions read_predictions_file(const std::string& path);

struct Bucket {
  std::int64_t hits = 0;
  std::int64_t total = 0;
  double accuracy() const { return total ? static_cast<double>(hits) / total : 0.0; }
};

struct ScoreReport {
  Bucket overall;
  std::map<std::string, Bucket> by_category;
  std::map<std::string, Bucket> by_elem_type;
  std::map<std::string, std::map<std::string, Bucket>> by_category_elem;
};

// A record is a hit iff its prediction exists and lies in the closed gt box.
ScoreReport score_predictions(const std::vector<io::Record>& records,
                              const Predictions& predictions);

std::string report_json(const ScoreReport& report);
// One row per category, one column per elem_type (text and icon first) plus
// Avg, and a closing Overall row. Accuracies in percent.
std::string report_table(const ScoreReport& report);

}  // namespace groundrl::eval

#endif  // GROUNDRL_EVALKIT_HPP_
