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

#ifndef GROUNDRL_CURATION_HPP_
#define GROUNDRL_CURATION_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "groundrl/dataset_io.hpp"
#include "groundrl/random.hpp"
#include "groundrl/synthgym.hpp"
#include "groundrl/types.hpp"

namespace groundrl::curation {

// ---- regex stage ---------------------------------------------------------

class PatternSet {
 public:
  // Empty or whitespace-only text, angle-bracket widget names such as
  // <PushButton>, and bare dotted class paths such as QtWidgets.QPushButton.
  static PatternSet Default();
  // ECMAScript syntax, searched anywhere in the instruction. Throws
  // ConfigError naming the first pattern that does not compile.
  static PatternSet FromStrings(const std::vector<std::string>& patterns);
  // One pattern per line; blank lines and lines starting with '#' are skipped.
  static PatternSet FromFile(const std::string& path);

  bool matches_any(const std::string& text) const;
  const std::vector<std::string>& sources() const { return sources_; }

 private:
  std::vector<std::string> sources_;
  std::vector<std::regex> compiled_;
};

// true = keep (no pattern matched).
bool regex_filter(const std::string& instruction, const PatternSet& patterns);

// ---- judges --------------------------------------------------------------

enum class JudgeKind { kInstruction, kBBox };
enum class Verdict { kYes, kNo };

std::string_view to_string(JudgeKind kind);  // "instruction" / "bbox"
std::optional<JudgeKind> judge_kind_from_string(std::string_view s);
std::string_view to_string(Verdict v);       // "yes" / "no"

struct ScorerVerdict {
  std::string sample_id;
  JudgeKind kind = JudgeKind::kInstruction;
  Verdict verdict = Verdict::kNo;
  std::string raw_response;
};

struct JudgeRequest {
  std::string sample_id;
  JudgeKind kind = JudgeKind::kInstruction;
  std::string prompt;
};

class ExternalJudge {
 public:
  virtual ~ExternalJudge() = default;
  // Returns the judge's free-text answer. Throws TransportError for
  // retriable failures and DataError for permanent ones.
  virtual std::string complete(const JudgeRequest& request) = 0;
};

// Canned answers from a JSONL transcript of
//   {"sample_id": str, "kind": "instruction"|"bbox", "response": str}
// A request with no transcript entry throws DataError.
class ReplayJudge final : public ExternalJudge {
 public:
  static ReplayJudge FromFile(const std::string& path);
  static ReplayJudge FromStream(std::istream& in, std::string_view name);
  void add(std::string sample_id, JudgeKind kind, std::string response);

  std::string complete(const JudgeRequest& request) override;
  std::size_t size() const { return responses_.size(); }

 private:
  std::map<std::pair<std::string, JudgeKind>, std::string> responses_;
};

struct HttpJudgeConfig {
  std::string url;    // full endpoint, e.g. http://localhost:8000/v1/chat/completions
  std::string model;
  std::string token_env = "SEGUI_JUDGE_TOKEN";
  int timeout_seconds = 60;
};

// Chat-completions client: POSTs {"model", "messages": [{"role": "user",
// "content": prompt}]} and returns choices[0].message.content. The bearer
// token is read from the environment on construction; no header is sent when
// the variable is unset.
class HttpJudge final : public ExternalJudge {
 public:
  explicit HttpJudge(HttpJudgeConfig cfg);
  ~HttpJudge() override;
  HttpJudge(const HttpJudge&) = delete;
  HttpJudge& operator=(const HttpJudge&) = delete;

  std::string complete(const JudgeRequest& request) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::string instruction_prompt(const Sample& sample);
// The bbox template followed by one line describing the cropped region
// (source, box and screen size), since screens are not decoded here.
std::string bbox_prompt(const Sample& sample);

// Reads the first word after the last "Conclusion" marker. Yes/No in any
// case, optionally followed by punctuation; anything else is kNo.
Verdict parse_verdict(std::string_view response);

ScorerVerdict judge_instruction(const Sample& sample, ExternalJudge& judge);
ScorerVerdict judge_bbox(const Sample& sample, ExternalJudge& judge);

// ---- difficulty stage ----------------------------------------------------

// Draws one response for a record. May throw; a throwing draw is a miss.
using RolloutFn = std::function<Rollout(const io::Record&, Rng&)>;

// keep = not all k draws land inside the ground-truth box.
bool difficulty_filter(const io::Record& record, const RolloutFn& rollout_fn, Rng& rng,
                       int k = 8);

// Samples the toy policy on synthetic records; image records throw DataError
// (so they are never judged too easy).
RolloutFn toy_rollout_fn(synth::GridPolicy policy, double garble_prob);

// ---- pipeline ------------------------------------------------------------

enum class Stage { kRegex, kInstruction, kBBox, kDifficulty };
std::string_view to_string(Stage s);  // "regex" / "instruction" / "bbox" / "difficulty"

struct PipelineConfig {
  PatternSet patterns = PatternSet::Default();
  int difficulty_k = 8;
  std::uint64_t seed = 0;
  int workers = 1;
  // Extra attempts per judge call after a TransportError.
  int max_retries = 2;
};

struct SampleTrail {
  std::string sample_id;
  CurationFlags flags;
  std::optional<Stage> rejected_by;
  std::vector<ScorerVerdict> verdicts;
};

struct CurationReport {
  std::int64_t input_count = 0;
  std::int64_t regex_rejected = 0;
  std::int64_t instr_rejected = 0;
  std::int64_t bbox_rejected = 0;
  std::int64_t difficulty_rejected = 0;
  std::int64_t kept = 0;
  // Records after an abort point; zero on a complete run.
  std::int64_t unprocessed = 0;
  std::optional<std::string> abort_reason;
  std::vector<SampleTrail> trail;

  bool partition_holds() const {
    return regex_rejected + instr_rejected + bbox_rejected + difficulty_rejected + kept +
               unprocessed ==
           input_count;
  }
};

struct PipelineResult {
  std::vector<io::Record> kept;  // input order, curation flags filled in
  CurationReport report;
};

// regex -> instruction judge -> bbox judge -> difficulty, stopping at the first
// rejection. Per-sample randomness is keyed by (seed, sample id), so the
// result does not depend on input position or worker count. A judge failure
// that survives the retries stops the run: the report then covers the
// records before the first failing one and counts the rest as unprocessed.
PipelineResult run_pipeline(const std::vector<io::Record>& records, ExternalJudge& judge,
                            const RolloutFn& rollout_fn, const PipelineConfig& cfg);

std::string report_to_json(const CurationReport& report);

}  // namespace groundrl::curation

#endif  // GROUNDRL_CURATION_HPP_
