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

#include "groundrl/curation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "groundrl/errors.hpp"
#include "groundrl/parallel.hpp"
#include "json.hpp"

namespace groundrl::curation {
namespace {

constexpr std::string_view kBBoxTemplate =
    R"(Analyze the provided cropped image from a screenshot to determine whether it contains a single, valid, and visually complete UI element.

Criteria for validity:

- The image must contain exactly one UI element.
- The element must be entirely visible within the cropped area, with no significant cut-off parts.
- The image should not consist solely of background, empty space, or meaningless fragments.

Response format:

Conclude with your final determination in a dedicated section:

Conclusion
Yes (if the image contains a single, valid, and complete UI element)
No (if it does not meet the criteria))";

constexpr std::string_view kInstructionTemplate =
    R"(Analyze whether the instruction text precisely identifies the UI element in the image based on:
1. Does the instruction EXACTLY match visible text/core function?
2. Could the instruction confuse similar elements in context?
3. Does it clearly indicate the required action without ambiguity?

Instruction to evaluate: {instruction}

Conclude with your final determination:

Conclusion
Yes (if all criteria are met)
No (if any criterion fails))";

// Tags for derive_seed.
constexpr std::uint64_t kDifficultyStream = 0x64696666;

std::string substitute(std::string_view tmpl, std::string_view key, std::string_view value) {
  std::string out(tmpl);
  const std::size_t at = out.find(key);
  if (at != std::string::npos) out.replace(at, key.size(), value);
  return out;
}

}  // namespace

// ---- regex ---------------------------------------------------------------

PatternSet PatternSet::Default() {
  return FromStrings({
      R"(^\s*$)",
      R"(<[A-Za-z_][A-Za-z0-9_]*>)",
      R"(^\s*[A-Za-z_]\w*(\.[A-Za-z_]\w*)+\s*$)",
  });
}

PatternSet PatternSet::FromStrings(const std::vector<std::string>& patterns) {
  PatternSet set;
  for (const auto& p : patterns) {
    try {
      set.compiled_.emplace_back(p, std::regex::ECMAScript | std::regex::optimize);
    } catch (const std::regex_error& e) {
      throw ConfigError("invalid regex pattern '" + p + "': " + e.what());
    }
    set.sources_.push_back(p);
  }
  return set;
}

PatternSet PatternSet::FromFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open pattern file " + path);
  std::vector<std::string> patterns;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    patterns.push_back(line);
  }
  return FromStrings(patterns);
}

bool PatternSet::matches_any(const std::string& text) const {
  return std::any_of(compiled_.begin(), compiled_.end(),
                     [&](const std::regex& re) { return std::regex_search(text, re); });
}

bool regex_filter(const std::string& instruction, const PatternSet& patterns) {
  return !patterns.matches_any(instruction);
}

// ---- judges --------------------------------------------------------------

std::string_view to_string(JudgeKind kind) {
  return kind == JudgeKind::kInstruction ? "instruction" : "bbox";
}

std::optional<JudgeKind> judge_kind_from_string(std::string_view s) {
  if (s == "instruction") return JudgeKind::kInstruction;
  if (s == "bbox") return JudgeKind::kBBox;
  return std::nullopt;
}

std::string_view to_string(Verdict v) { return v == Verdict::kYes ? "yes" : "no"; }

ReplayJudge ReplayJudge::FromFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open transcript " + path);
  return FromStream(in, path);
}

ReplayJudge ReplayJudge::FromStream(std::istream& in, std::string_view name) {
  ReplayJudge judge;
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
    if (!doc.is_object() || !doc.contains("sample_id") || !doc["sample_id"].is_string() ||
        !doc.contains("kind") || !doc["kind"].is_string() || !doc.contains("response") ||
        !doc["response"].is_string()) {
      throw DataError(where + "transcript entries need string sample_id, kind and response");
    }
    const auto kind = judge_kind_from_string(doc["kind"].get<std::string>());
    if (!kind) throw DataError(where + "kind must be 'instruction' or 'bbox'");
    auto key = std::make_pair(doc["sample_id"].get<std::string>(), *kind);
    if (judge.responses_.count(key)) {
      throw DataError(where + "duplicate entry for " + key.first + "/" +
                      std::string(to_string(*kind)));
    }
    judge.responses_.emplace(std::move(key), doc["response"].get<std::string>());
  }
  return judge;
}

void ReplayJudge::add(std::string sample_id, JudgeKind kind, std::string response) {
  responses_[{std::move(sample_id), kind}] = std::move(response);
}

std::string ReplayJudge::complete(const JudgeRequest& request) {
  const auto it = responses_.find({request.sample_id, request.kind});
  if (it == responses_.end()) {
    throw DataError("no transcript entry for " + request.sample_id + "/" +
                    std::string(to_string(request.kind)));
  }
  return it->second;
}

std::string instruction_prompt(const Sample& sample) {
  return substitute(kInstructionTemplate, "{instruction}", sample.instruction);
}

std::string bbox_prompt(const Sample& sample) {
  std::ostringstream os;
  os << kBBoxTemplate << "\n\nCropped region: ";
  if (const auto* img = std::get_if<ImageSource>(&sample.source)) {
    os << "image " << img->path;
  } else {
    const auto& syn = std::get<SyntheticSource>(sample.source);
    os << "synthetic grid " << syn.rows << "x" << syn.cols;
  }
  const BBox& b = sample.gt_bbox;
  os << ", box [" << b.x1 << ", " << b.y1 << ", " << b.x2 << ", " << b.y2 << "] on a "
     << sample.screen.width << "x" << sample.screen.height << " screen";
  return os.str();
}

Verdict parse_verdict(std::string_view response) {
  constexpr std::string_view kMarker = "Conclusion";
  const std::size_t at = response.rfind(kMarker);
  if (at == std::string_view::npos) return Verdict::kNo;
  std::size_t i = at + kMarker.size();
  auto skippable = [](char c) {
    return std::isspace(static_cast<unsigned char>(c)) || c == ':' || c == '*' || c == '#';
  };
  while (i < response.size() && skippable(response[i])) ++i;
  std::size_t j = i;
  while (j < response.size() && std::isalpha(static_cast<unsigned char>(response[j]))) ++j;
  std::string word(response.substr(i, j - i));
  std::transform(word.begin(), word.end(), word.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return word == "yes" ? Verdict::kYes : Verdict::kNo;
}

namespace {

ScorerVerdict run_judge(const Sample& sample, ExternalJudge& judge, JudgeKind kind,
                        std::string prompt) {
  ScorerVerdict v;
  v.sample_id = sample.id;
  v.kind = kind;
  v.raw_response = judge.complete(JudgeRequest{sample.id, kind, std::move(prompt)});
  v.verdict = parse_verdict(v.raw_response);
  return v;
}

ScorerVerdict judge_with_retries(const Sample& sample, ExternalJudge& judge, JudgeKind kind,
                                 int max_retries) {
  for (int attempt = 0;; ++attempt) {
    try {
      return kind == JudgeKind::kInstruction ? judge_instruction(sample, judge)
                                             : judge_bbox(sample, judge);
    } catch (const TransportError&) {
      if (attempt >= max_retries) throw;
    }
  }
}

}  // namespace

ScorerVerdict judge_instruction(const Sample& sample, ExternalJudge& judge) {
  return run_judge(sample, judge, JudgeKind::kInstruction, instruction_prompt(sample));
}

ScorerVerdict judge_bbox(const Sample& sample, ExternalJudge& judge) {
  return run_judge(sample, judge, JudgeKind::kBBox, bbox_prompt(sample));
}

// ---- difficulty ----------------------------------------------------------

bool difficulty_filter(const io::Record& record, const RolloutFn& rollout_fn, Rng& rng, int k) {
  if (k < 1) throw ConfigError("difficulty rollouts k must be >= 1");
  int hits = 0;
  for (int i = 0; i < k; ++i) {
    try {
      const Rollout r = rollout_fn(record, rng);
      if (r.format_valid && r.point && point_in_bbox(*r.point, record.sample.gt_bbox)) ++hits;
    } catch (const std::exception&) {
      // A failed draw is a miss.
    }
  }
  return hits < k;
}

RolloutFn toy_rollout_fn(synth::GridPolicy policy, double garble_prob) {
  return [policy = std::move(policy), garble_prob](const io::Record& record, Rng& rng) {
    const synth::Task task = synth::task_from_record(record);
    return synth::sample_rollout(policy, task, rng, garble_prob);
  };
}

// ---- pipeline ------------------------------------------------------------

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::kRegex: return "regex";
    case Stage::kInstruction: return "instruction";
    case Stage::kBBox: return "bbox";
    case Stage::kDifficulty: return "difficulty";
  }
  return "?";
}

namespace {

struct Outcome {
  SampleTrail trail;
  std::optional<std::string> error;
};

Outcome curate_one(const io::Record& record, ExternalJudge& judge, const RolloutFn& rollout_fn,
                   const PipelineConfig& cfg) {
  Outcome out;
  SampleTrail& t = out.trail;
  t.sample_id = record.sample.id;
  try {
    if (!regex_filter(record.sample.instruction, cfg.patterns)) {
      t.rejected_by = Stage::kRegex;
      return out;
    }
    t.flags.set(CurationFlag::kRegexPass);

    t.verdicts.push_back(
        judge_with_retries(record.sample, judge, JudgeKind::kInstruction, cfg.max_retries));
    if (t.verdicts.back().verdict != Verdict::kYes) {
      t.rejected_by = Stage::kInstruction;
      return out;
    }
    t.flags.set(CurationFlag::kInstructionScorePass);

    t.verdicts.push_back(
        judge_with_retries(record.sample, judge, JudgeKind::kBBox, cfg.max_retries));
    if (t.verdicts.back().verdict != Verdict::kYes) {
      t.rejected_by = Stage::kBBox;
      return out;
    }
    t.flags.set(CurationFlag::kBBoxScorePass);

    const auto id_bytes = std::span<const char>(record.sample.id.data(), record.sample.id.size());
    Rng rng(derive_seed(cfg.seed, {kDifficultyStream, fnv1a64(id_bytes)}));
    if (!difficulty_filter(record, rollout_fn, rng, cfg.difficulty_k)) {
      t.rejected_by = Stage::kDifficulty;
      return out;
    }
    t.flags.set(CurationFlag::kDifficultyPass);
  } catch (const DataError& e) {
    out.error = record.sample.id + ": " + e.what();
  } catch (const TransportError& e) {
    out.error = record.sample.id + ": " + e.what();
  }
  return out;
}

}  // namespace

PipelineResult run_pipeline(const std::vector<io::Record>& records, ExternalJudge& judge,
                            const RolloutFn& rollout_fn, const PipelineConfig& cfg) {
  if (cfg.difficulty_k < 1) throw ConfigError("difficulty rollouts k must be >= 1");
  if (cfg.workers < 1) throw ConfigError("workers must be >= 1");
  if (cfg.max_retries < 0) throw ConfigError("max_retries must be >= 0");

  std::vector<Outcome> outcomes(records.size());
  parallel_for(records.size(), cfg.workers, [&](std::size_t i) {
    outcomes[i] = curate_one(records[i], judge, rollout_fn, cfg);
  });

  PipelineResult result;
  CurationReport& rep = result.report;
  rep.input_count = static_cast<std::int64_t>(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    Outcome& o = outcomes[i];
    if (o.error) {
      rep.abort_reason = *o.error;
      rep.unprocessed = static_cast<std::int64_t>(records.size() - i);
      break;
    }
    if (!o.trail.rejected_by) {
      ++rep.kept;
      io::Record kept = records[i];
      kept.sample.curation = o.trail.flags;
      result.kept.push_back(std::move(kept));
    } else {
      switch (*o.trail.rejected_by) {
        case Stage::kRegex: ++rep.regex_rejected; break;
        case Stage::kInstruction: ++rep.instr_rejected; break;
        case Stage::kBBox: ++rep.bbox_rejected; break;
        case Stage::kDifficulty: ++rep.difficulty_rejected; break;
      }
    }
    rep.trail.push_back(std::move(o.trail));
  }
  return result;
}

std::string report_to_json(const CurationReport& report) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["input_count"] = report.input_count;
  doc["regex_rejected"] = report.regex_rejected;
  doc["instr_rejected"] = report.instr_rejected;
  doc["bbox_rejected"] = report.bbox_rejected;
  doc["difficulty_rejected"] = report.difficulty_rejected;
  doc["kept"] = report.kept;
  doc["unprocessed"] = report.unprocessed;
  doc["abort_reason"] =
      report.abort_reason ? ordered_json(*report.abort_reason) : ordered_json(nullptr);
  ordered_json samples = ordered_json::array();
  constexpr CurationFlag kFlags[] = {CurationFlag::kRegexPass, CurationFlag::kInstructionScorePass,
                                     CurationFlag::kBBoxScorePass, CurationFlag::kDifficultyPass};
  for (const auto& t : report.trail) {
    ordered_json s;
    s["id"] = t.sample_id;
    ordered_json flags = ordered_json::array();
    for (auto f : kFlags) {
      if (t.flags.has(f)) flags.push_back(std::string(to_string(f)));
    }
    s["flags"] = std::move(flags);
    s["rejected_by"] =
        t.rejected_by ? ordered_json(std::string(to_string(*t.rejected_by))) : ordered_json(nullptr);
    ordered_json verdicts = ordered_json::array();
    for (const auto& v : t.verdicts) {
      verdicts.push_back({{"kind", std::string(to_string(v.kind))},
                          {"verdict", std::string(to_string(v.verdict))},
                          {"raw_response", v.raw_response}});
    }
    s["verdicts"] = std::move(verdicts);
    samples.push_back(std::move(s));
  }
  doc["samples"] = std::move(samples);
  return doc.dump(2) + "\n";
}

}  // namespace groundrl::curation
