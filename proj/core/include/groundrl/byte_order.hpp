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

#ifndef GROUNDRL_BYTE_ORDER_HPP_
#define GROUNDRL_BYTE_ORDER_HPP_

#include <array>
#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>

namespace groundrl {

inline void put_f32le(std::ostream& out, float v) {
  const auto u = std::bit_cast<std::uint32_t>(v);
  const std::array<char, 4> b{static_cast<char>(u & 0xff), static_cast<char>((u >> 8) & 0xff),
                              static_cast<char>((u >> 16) & 0xff),
                              static_cast<char>((u >> 24) & 0xff)};
  out.write(b.data(), b.size());
}

inline bool get_f32le(std::istream& in, float& v) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), b.size())) return false;
  const std::uint32_t u = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
                          (static_cast<std::uint32_t>(b[2]) << 16) |
                          (static_cast<std::uint32_t>(b[3]) << 24);
  v = std::bit_cast<float>(u);
  return true;
}

}  // namespace groundrl

#endif  // GROUNDRL_BYTE_ORDER_HPP_
