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

#include "groundrl/dataset_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "groundrl/errors.hpp"
#include "json.hpp"

namespace groundrl::io {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr CurationFlag kAllFlags[] = {
    CurationFlag::kRegexPass, CurationFlag::kInstructionScorePass,
    CurationFlag::kBBoxScorePass, CurationFlag::kDifficultyPass};

[[noreturn]] void fail(std::string_view name, std::size_t line, const std::string& what) {
  throw DataError(std::string(name) + ":" + std::to_string(line) + ": " + what);
}

const json& require(const json& obj, const char* key, std::string_view name, std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(name, line, std::string("missing field '") + key + "'");
  return *it;
}

int require_int(const json& v, const char* what, std::string_view name, std::size_t line) {
  if (!v.is_number_integer()) fail(name, line, std::string(what) + " must be an integer");
  return v.get<int>();
}

Record parse_record(const json& doc, std::string_view name, std::size_t line) {
  if (!doc.is_object()) fail(name, line, "record must be a JSON object");
  Record rec;
  Sample& s = rec.sample;

  const auto& id = require(doc, "id", name, line);
  if (!id.is_string() || id.get<std::string>().empty()) {
    fail(name, line, "'id' must be a non-empty string");
  }
  s.id = id.get<std::string>();

  const auto& instr = require(doc, "instruction", name, line);
  if (!instr.is_string()) fail(name, line, "'instruction' must be a string");
  s.instruction = instr.get<std::string>();

  const auto& screen = require(doc, "screen", name, line);
  if (!screen.is_object()) fail(name, line, "'screen' must be an object");
  const int w = require_int(require(screen, "w", name, line), "screen.w", name, line);
  const int h = require_int(require(screen, "h", name, line), "screen.h", name, line);
  if (w < 1 || h < 1) fail(name, line, "screen dimensions must be positive");
  s.screen = ScreenSize{w, h};

  const auto& bbox = require(doc, "bbox", name, line);
  if (!bbox.is_array() || bbox.size() != 4) fail(name, line, "'bbox' must be [x1,y1,x2,y2]");
  for (const auto& v : bbox) {
    if (!v.is_number()) fail(name, line, "'bbox' entries must be numbers");
  }
  s.gt_bbox = BBox{bbox[0].get<double>(), bbox[1].get<double>(), bbox[2].get<double>(),
                   bbox[3].get<double>()};
  if (!s.gt_bbox.is_ordered()) fail(name, line, "bbox needs x1 <= x2 and y1 <= y2");
  if (!s.gt_bbox.fits(s.screen)) fail(name, line, "bbox lies outside the screen");

  s.source = ImageSource{};
  if (const auto src = doc.find("source"); src != doc.end()) {
    if (!src->is_object()) fail(name, line, "'source' must be an object");
    const auto& kind = require(*src, "kind", name, line);
    if (kind == "image") {
      ImageSource img;
      if (const auto p = src->find("path"); p != src->end()) {
        if (!p->is_string()) fail(name, line, "source.path must be a string");
        img.path = p->get<std::string>();
      }
      s.source = img;
    } else if (kind == "synthetic") {
      const auto& grid = require(*src, "grid", name, line);
      if (!grid.is_array() || grid.size() != 2) fail(name, line, "source.grid must be [R,C]");
      SyntheticSource syn{require_int(grid[0], "grid rows", name, line),
                          require_int(grid[1], "grid cols", name, line)};
      if (syn.rows < 1 || syn.cols < 1) fail(name, line, "source.grid must be positive");
      s.source = syn;

      const auto& feats = require(*src, "features", name, line);
      if (!feats.is_array() || feats.size() != static_cast<std::size_t>(syn.rows * syn.cols)) {
        fail(name, line, "source.features needs one row per grid cell");
      }
      SyntheticPayload payload;
      payload.feature_dim = feats.empty() ? 0 : static_cast<int>(feats[0].size());
      if (payload.feature_dim < 1) fail(name, line, "source.features rows must be non-empty");
      payload.features.reserve(feats.size() * payload.feature_dim);
      for (const auto& row : feats) {
        if (!row.is_array() || static_cast<int>(row.size()) != payload.feature_dim) {
          fail(name, line, "source.features rows must share one length");
        }
        for (const auto& v : row) {
          if (!v.is_number()) fail(name, line, "source.features entries must be numbers");
          payload.features.push_back(v.get<double>());
        }
      }
      if (const auto n = src->find("annotation_noise"); n != src->end()) {
        if (!n->is_boolean()) fail(name, line, "source.annotation_noise must be a boolean");
        payload.annotation_noise = n->get<bool>();
      }
      rec.synthetic = std::move(payload);
    } else {
      fail(name, line, "source.kind must be \"synthetic\" or \"image\"");
    }
  }

  for (const char* key : {"category", "elem_type"}) {
    if (const auto it = doc.find(key); it != doc.end()) {
      if (!it->is_string()) fail(name, line, std::string("'") + key + "' must be a string");
      (std::string_view(key) == "category" ? rec.category : rec.elem_type) =
          it->get<std::string>();
    }
  }

  if (const auto cur = doc.find("curation"); cur != doc.end()) {
    if (!cur->is_array()) fail(name, line, "'curation' must be an array of flags");
    for (const auto& f : *cur) {
      bool known = false;
      for (CurationFlag flag : kAllFlags) {
        if (f.is_string() && f.get<std::string>() == to_string(flag)) {
          s.curation.set(flag);
          known = true;
        }
      }
      if (!known) fail(name, line, "unknown curation flag " + f.dump());
    }
  }
  return rec;
}

}  // namespace

std::vector<Record> read_records(std::istream& in, std::string_view name) {
  std::vector<Record> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    const json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) fail(name, line, "invalid JSON");
    out.push_back(parse_record(doc, name, line));
  }
  if (in.bad()) throw DataError(std::string(name) + ": read error");
  return out;
}

std::vector<Record> read_records_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return read_records(in, path);
}

void write_record(std::ostream& out, const Record& rec) {
  const Sample& s = rec.sample;
  ordered_json doc;
  doc["id"] = s.id;
  doc["instruction"] = s.instruction;
  doc["bbox"] = {s.gt_bbox.x1, s.gt_bbox.y1, s.gt_bbox.x2, s.gt_bbox.y2};
  doc["screen"] = {{"w", s.screen.width}, {"h", s.screen.height}};

  ordered_json src;
  if (const auto* syn = std::get_if<SyntheticSource>(&s.source)) {
    src["kind"] = "synthetic";
    src["grid"] = {syn->rows, syn->cols};
    ordered_json rows = ordered_json::array();
    if (rec.synthetic) {
      const auto& p = *rec.synthetic;
      for (std::size_t i = 0; i + p.feature_dim <= p.features.size(); i += p.feature_dim) {
        rows.push_back(std::vector<double>(p.features.begin() + i,
                                           p.features.begin() + i + p.feature_dim));
      }
      if (p.annotation_noise) src["annotation_noise"] = true;
    }
    src["features"] = std::move(rows);
  } else {
    src["kind"] = "image";
    src["path"] = std::get<ImageSource>(s.source).path;
  }
  doc["source"] = std::move(src);

  if (rec.category) doc["category"] = *rec.category;
  if (rec.elem_type) doc["elem_type"] = *rec.elem_type;
  if (s.curation.bits() != 0) {
    ordered_json flags = ordered_json::array();
    for (CurationFlag f : kAllFlags) {
      if (s.curation.has(f)) flags.push_back(to_string(f));
    }
    doc["curation"] = std::move(flags);
  }
  out << doc.dump() << '\n';
}

void write_records_file(const std::string& path, const std::vector<Record>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  for (const auto& r : records) write_record(out, r);
  if (!out) throw DataError("write failed for " + path);
}

}  // namespace groundrl::io
