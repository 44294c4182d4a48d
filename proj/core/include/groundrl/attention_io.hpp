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

#ifndef GROUNDRL_ATTENTION_IO_HPP_
#define GROUNDRL_ATTENTION_IO_HPP_

#include <iosfwd>
#include <string>

#include "groundrl/attention.hpp"

namespace groundrl::attention {

// {"h": H, "w": W, "dtype": "f32le"}\n followed by H*W little-endian floats,
// row-major.
void write_map(std::ostream& out, const AttentionMap& map);
void write_map_file(const std::string& path, const AttentionMap& map);
// Throws DataError on a bad header or a short/long payload.
AttentionMap read_map(std::istream& in);
AttentionMap read_map_file(const std::string& path);

// Binary PPM (P6) rendered with a black-red-yellow-white ramp.
void write_heatmap_ppm(std::ostream& out, const AttentionMap& map);
void write_heatmap_ppm_file(const std::string& path, const AttentionMap& map);

}  // namespace groundrl::attention

#endif  // GROUNDRL_ATTENTION_IO_HPP_
