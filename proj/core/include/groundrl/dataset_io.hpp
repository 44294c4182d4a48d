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

#ifndef GROUNDRL_DATASET_IO_HPP_
#define GROUNDRL_DATASET_IO_HPP_

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "groundrl/types.hpp"

namespace groundrl::io {

// Feature payload of a synthetic screen: one row of `feature_dim` observed
// values per grid cell, row-major over cells.
struct SyntheticPayload {
  int feature_dim = 0;
  std::vector<double> features;
  bool annotation_noise = false;
};

// One line of a dataset or benchmark file:
//   {"id": str, "instruction": str, "bbox": [x1,y1,x2,y2],
//    "screen": {"w": int, "h": int},
//    "source": {"kind": "synthetic", "grid": [R,C], "features": [[...],...]}
//            | {"kind": "image", "path": str},
//    "category": str?, "elem_type": str?, "curation": [flag, ...]?}
struct Record {
  Sample sample;
  std::optional<SyntheticPayload> synthetic;
  std::optional<std::string> category;
  std::optional<std::string> elem_type;
};

// Parses a JSONL stream. Blank lines are skipped. Any malformed record or
// BBox invariant violation throws DataError("<name>:<line>: ...").
std::vector<Record> read_records(std::istream& in, std::string_view name);
std::vector<Record> read_records_file(const std::string& path);

void write_record(std::ostream& out, const Record& record);
void write_records_file(const std::string& path, const std::vector<Record>& records);

}  // namespace groundrl::io

#endif  // GROUNDRL_DATASET_IO_HPP_
