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

#include "groundrl/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>

#include "groundrl/errors.hpp"
#include "groundrl/tool_call.hpp"
#include "json.hpp"

namespace groundrl::eval {

std::vector<io::Record> load_benchmark(const std::string& path) { return io::read_records_file(path); }

Predictions read_predictions(std::istream& in, std::string_view name) {
  Predictions out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = std::string(name) + ":" + std::to_string(lineno) + ": ";
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where + e.what());
    }
    if (!doc.is_object() || !doc.contains("id") || !doc["id"].is_string()) {
      throw DataError(where + "prediction needs a string 'id'");
    }
    const std::string id = doc["id"].get<std::string>();
    if (out.count(id)) throw DataError(where + "duplicate prediction for " + id);
    if (doc.contains("point")) {
      const auto& p = doc["point"];
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
        throw DataError(where + "'point' must be [x, y]");
      }
      const Point pt{p[0].get<double>(), p[1].get<double>()};
      if (!std::isfinite(pt.x) || !std::isfinite(pt.y)) throw DataError(where + "non-finite point");
      out.emplace(id, pt);
    } else if (doc.contains("response") && doc["response"].is_string()) {
      const auto parsed = parse_click_point(doc["response"].get<std::string>());
      if (parsed.format_valid && parsed.point) out.emplace(id, *parsed.point);
    } else {
      throw DataError(where + "prediction needs 'point' or 'response'");
    }
  }
  return out;
}

Predictions read_predictions_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open predictions " + path);
  return read_predictions(in, path);
}

ScoreReport score_predictions(const std::vector<io::Record>& records,
                              const Predictions& predictions) {
  ScoreReport rep;
  for (const auto& r : records) {
    const auto it = predictions.find(r.sample.id);
    const bool hit = it != predictions.end() && point_in_bbox(it->second, r.sample.gt_bbox);
    const std::string cat = r.category.value_or(std::string(kNoTag));
    const std::string elem = r.elem_type.value_or(std::string(kNoTag));
    for (Bucket* b : {&rep.overall, &rep.by_category[cat], &rep.by_elem_type[elem],
                      &rep.by_category_elem[cat][elem]}) {
      ++b->total;
      b->hits += hit;
    }
  }
  return rep;
}

namespace {

nlohmann::ordered_json bucket_json(const Bucket& b) {
  return {{"hits", b.hits}, {"total", b.total}, {"accuracy", b.accuracy()}};
}

std::vector<std::string> elem_columns(const ScoreReport& rep) {
  std::vector<std::string> cols;
  for (const char* fixed : {"text", "icon"}) cols.emplace_back(fixed);
  for (const auto& [k, _] : rep.by_elem_type) {
    if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
  }
  return cols;
}

std::string cell(const Bucket* b) {
  if (!b || b->total == 0) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * b->accuracy());
  return buf;
}

}  // namespace

std::string report_json(const ScoreReport& rep) {
  nlohmann::ordered_json j;
  j["overall"] = bucket_json(rep.overall);
  nlohmann::ordered_json cats = nlohmann::ordered_json::object();
  for (const auto& [k, b] : rep.by_category) cats[k] = bucket_json(b);
  j["by_category"] = std::move(cats);
  nlohmann::ordered_json elems = nlohmann::ordered_json::object();
  for (const auto& [k, b] : rep.by_elem_type) elems[k] = bucket_json(b);
  j["by_elem_type"] = std::move(elems);
  nlohmann::ordered_json grid = nlohmann::ordered_json::object();
  for (const auto& [cat, row] : rep.by_category_elem) {
    nlohmann::ordered_json r = nlohmann::ordered_json::object();
    for (const auto& [elem, b] : row) r[elem] = bucket_json(b);
    grid[cat] = std::move(r);
  }
  j["by_category_elem"] = std::move(grid);
  return j.dump(2) + "\n";
}

std::string report_table(const ScoreReport& rep) {
  const auto cols = elem_columns(rep);
  std::size_t name_w = std::string_view("Overall").size();
  for (const auto& [k, _] : rep.by_category) name_w = std::max(name_w, k.size());

  auto column_name = [](std::string s) {
    if (!s.empty() && s != kNoTag) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
  };
  std::vector<std::size_t> widths;
  for (const auto& c : cols) widths.push_back(std::max<std::size_t>(6, c.size()));

  std::string out;
  auto row = [&](const std::string& name, const std::vector<std::string>& cells, const std::string& avg) {
    out += name + std::string(name_w - name.size(), ' ');
    for (std::size_t i = 0; i < cells.size(); ++i) {
      out += "  " + std::string(widths[i] - std::min(widths[i], cells[i].size()), ' ') + cells[i];
    }
    out += "  " + std::string(6 - std::min<std::size_t>(6, avg.size()), ' ') + avg + "\n";
  };

  std::vector<std::string> header;
  for (const auto& c : cols) header.push_back(column_name(c));
  row("", header, "Avg");
  for (const auto& [cat, bucket] : rep.by_category) {
    std::vector<std::string> cells;
    const auto& line = rep.by_category_elem.at(cat);
    for (const auto& c : cols) {
      const auto it = line.find(c);
      cells.push_back(cell(it == line.end() ? nullptr : &it->second));
    }
    row(cat, cells, cell(&bucket));
  }
  std::vector<std::string> totals;
  for (const auto& c : cols) {
    const auto it = rep.by_elem_type.find(c);
    totals.push_back(cell(it == rep.by_elem_type.end() ? nullptr : &it->second));
  }
  row("Overall", totals, cell(&rep.overall));
  return out;
}

}  // namespace groundrl::eval
