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

#include "groundrl/attention_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "groundrl/byte_order.hpp"
#include "groundrl/errors.hpp"
#include "json.hpp"

namespace groundrl::attention {

void write_map(std::ostream& out, const AttentionMap& map) {
  nlohmann::ordered_json header;
  header["h"] = map.height();
  header["w"] = map.width();
  header["dtype"] = "f32le";
  out << header.dump() << '\n';
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) put_f32le(out, static_cast<float>(map.at(x, y)));
  }
}

AttentionMap read_map(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("attention map: missing header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("attention map: bad header: ") + e.what());
  }
  if (!header.is_object() || !header.contains("h") || !header.contains("w") ||
      !header["h"].is_number_integer() || !header["w"].is_number_integer() ||
      header.value("dtype", "") != "f32le") {
    throw DataError("attention map: header needs integer h, w and dtype f32le");
  }
  const long long h = header["h"].get<long long>();
  const long long w = header["w"].get<long long>();
  if (h < 1 || w < 1 || h * w > (1LL << 28)) throw DataError("attention map: bad dimensions");
  Eigen::MatrixXd values(h, w);
  for (long long y = 0; y < h; ++y) {
    for (long long x = 0; x < w; ++x) {
      float v = 0.0f;
      if (!get_f32le(in, v)) throw DataError("attention map: payload shorter than h*w floats");
      values(y, x) = v;
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw DataError("attention map: trailing bytes after payload");
  }
  return AttentionMap(std::move(values));
}

namespace {

std::array<unsigned char, 3> ramp(double v) {
  v = std::clamp(v, 0.0, 1.0) * 3.0;
  auto channel = [](double t) {
    return static_cast<unsigned char>(std::lround(std::clamp(t, 0.0, 1.0) * 255.0));
  };
  return {channel(v), channel(v - 1.0), channel(v - 2.0)};
}

}  // namespace

void write_heatmap_ppm(std::ostream& out, const AttentionMap& map) {
  out << "P6\n" << map.width() << ' ' << map.height() << "\n255\n";
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      const auto rgb = ramp(map.at(x, y));
      out.write(reinterpret_cast<const char*>(rgb.data()), rgb.size());
    }
  }
}

void write_map_file(const std::string& path, const AttentionMap& map) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path + " for writing");
  write_map(out, map);
  if (!out) throw DataError("write failed: " + path);
}

AttentionMap read_map_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return read_map(in);
}

void write_heatmap_ppm_file(const std::string& path, const AttentionMap& map) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path + " for writing");
  write_heatmap_ppm(out, map);
  if (!out) throw DataError("write failed: " + path);
}

}  // namespace groundrl::attention
