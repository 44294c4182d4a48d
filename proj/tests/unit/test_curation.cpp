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

#include <atomic>
#include <map>
#include <sstream>

#include "curation_fixtures.hpp"
#include "doctest.h"
#include "groundrl/curation.hpp"
#include "groundrl/errors.hpp"

using namespace groundrl;
using namespace groundrl::curation;

namespace {

io::Record plain_record(std::string id, std::string instruction) {
  io::Record r;
  r.sample.id = std::move(id);
  r.sample.screen = {100, 100};
  r.sample.source = ImageSource{"shot.png"};
  r.sample.instruction = std::move(instruction);
  r.sample.gt_bbox = {10, 10, 20, 20};
  return r;
}

RolloutFn hits_first(int hits) {
  auto calls = std::make_shared<int>(0);
  return [calls, hits](const io::Record& rec, Rng&) {
    Rollout r;
    r.format_valid = true;
    r.point = (*calls)++ % 8 < hits ? rec.sample.gt_bbox.center() : Point{90, 90};
    return r;
  };
}

class CountingJudge : public ExternalJudge {
 public:
  explicit CountingJudge(ExternalJudge& inner) : inner_(inner) {}
  std::string complete(const JudgeRequest& r) override {
    ++calls;
    return inner_.complete(r);
  }
  std::atomic<int> calls{0};

 private:
  ExternalJudge& inner_;
};

class FlakyJudge : public ExternalJudge {
 public:
  explicit FlakyJudge(int failures) : failures_(failures) {}
  std::string complete(const JudgeRequest& r) override {
    if (seen_[r.sample_id + std::string(to_string(r.kind))]++ < failures_)
      throw TransportError("connection refused");
    return fixtures::kYes;
  }

 private:
  int failures_;
  std::map<std::string, int> seen_;
};

}  // namespace

TEST_CASE("regex filter defaults") {
  const auto d = PatternSet::Default();
  CHECK(regex_filter("pin Jack's conversation", d));
  CHECK(regex_filter("open the settings menu", d));
  CHECK_FALSE(regex_filter("<PushButton>", d));
  CHECK_FALSE(regex_filter("", d));
  CHECK_FALSE(regex_filter("   ", d));
  CHECK_FALSE(regex_filter("QtWidgets.QPushButton", d));
  CHECK(regex_filter("go to example.com and log in", d));
  CHECK(regex_filter("a < b > c", d));
}

TEST_CASE("pattern sets") {
  const auto p = PatternSet::FromStrings({"^TODO", "x{3}"});
  CHECK_FALSE(regex_filter("TODO fix", p));
  CHECK_FALSE(regex_filter("zzxxxzz", p));
  CHECK(regex_filter("<PushButton>", p));
  CHECK(p.sources().size() == 2);
  CHECK_THROWS_AS(PatternSet::FromStrings({"("}), ConfigError);
  CHECK_THROWS_AS(PatternSet::FromFile("/nonexistent/patterns.txt"), ConfigError);
}

TEST_CASE("verdict parsing fails closed") {
  CHECK(parse_verdict("reasoning...\nConclusion\nYes") == Verdict::kYes);
  CHECK(parse_verdict("Conclusion: yes, it is") == Verdict::kYes);
  CHECK(parse_verdict("**Conclusion**\n\nYES") == Verdict::kYes);
  CHECK(parse_verdict("Conclusion\nNo") == Verdict::kNo);
  CHECK(parse_verdict("Yes") == Verdict::kNo);
  CHECK(parse_verdict("") == Verdict::kNo);
  CHECK(parse_verdict("Conclusion\nMaybe") == Verdict::kNo);
  CHECK(parse_verdict("Conclusion\nYesterday") == Verdict::kNo);
  CHECK(parse_verdict("Conclusion\nYes\n...\nConclusion\nNo") == Verdict::kNo);
}

TEST_CASE("prompts") {
  const auto r = plain_record("s1", "pin Jack's conversation");
  const std::string ip = instruction_prompt(r.sample);
  CHECK(ip.find("pin Jack's conversation") != std::string::npos);
  CHECK(ip.find("{instruction}") == std::string::npos);
  CHECK(ip.find("Conclusion") != std::string::npos);
  const std::string bp = bbox_prompt(r.sample);
  CHECK(bp.find("Conclusion") != std::string::npos);
  CHECK(bp.find("shot.png") != std::string::npos);
}

TEST_CASE("replay judge") {
  std::istringstream in(
      "{\"sample_id\":\"a\",\"kind\":\"instruction\",\"response\":\"Conclusion\\nYes\"}\n"
      "\n"
      "{\"sample_id\":\"a\",\"kind\":\"bbox\",\"response\":\"Conclusion\\nNo\"}\n");
  auto j = ReplayJudge::FromStream(in, "t");
  CHECK(j.size() == 2);
  const auto r = plain_record("a", "open");
  CHECK(judge_instruction(r.sample, j).verdict == Verdict::kYes);
  const auto v = judge_bbox(r.sample, j);
  CHECK(v.verdict == Verdict::kNo);
  CHECK(v.raw_response == "Conclusion\nNo");
  CHECK_THROWS_AS(judge_instruction(plain_record("b", "x").sample, j), DataError);

  std::istringstream dup(
      "{\"sample_id\":\"a\",\"kind\":\"bbox\",\"response\":\"\"}\n"
      "{\"sample_id\":\"a\",\"kind\":\"bbox\",\"response\":\"\"}\n");
  CHECK_THROWS_AS(ReplayJudge::FromStream(dup, "t"), DataError);
  std::istringstream bad_kind("{\"sample_id\":\"a\",\"kind\":\"image\",\"response\":\"\"}\n");
  CHECK_THROWS_AS(ReplayJudge::FromStream(bad_kind, "t"), DataError);
  std::istringstream not_json("sample_id=a\n");
  CHECK_THROWS_AS(ReplayJudge::FromStream(not_json, "t"), DataError);
}

TEST_CASE("difficulty filter") {
  const auto r = plain_record("a", "open");
  Rng rng(1);
  CHECK_FALSE(difficulty_filter(r, hits_first(8), rng));
  CHECK(difficulty_filter(r, hits_first(7), rng));
  CHECK(difficulty_filter(r, hits_first(0), rng));
  CHECK_FALSE(difficulty_filter(r, hits_first(3), rng, 3));
  CHECK_THROWS_AS(difficulty_filter(r, hits_first(8), rng, 0), ConfigError);

  auto invalid = [](const io::Record& rec, Rng&) {
    Rollout o;
    o.point = rec.sample.gt_bbox.center();
    o.format_valid = false;
    return o;
  };
  CHECK(difficulty_filter(r, invalid, rng));
  int calls = 0;
  auto throws_once = [&calls](const io::Record& rec, Rng&) {
    if (calls++ == 4) throw DataError("bad draw");
    Rollout o;
    o.format_valid = true;
    o.point = rec.sample.gt_bbox.center();
    return o;
  };
  CHECK(difficulty_filter(r, throws_once, rng));
}

TEST_CASE("empty input") {
  ReplayJudge j;
  const auto res = run_pipeline({}, j, hits_first(0), PipelineConfig{});
  CHECK(res.kept.empty());
  CHECK(res.report.input_count == 0);
  CHECK(res.report.partition_holds());
  CHECK_FALSE(res.report.abort_reason);
}

TEST_CASE("twenty widget placeholders are rejected by regex without judge calls") {
  auto p = fixtures::planted(11, 40, 0.0, 0.0, 0.0);
  for (int i = 0; i < 20; ++i) p.records[i].sample.instruction = "<Widget>";
  CountingJudge counting(*p.judge);
  const auto res = run_pipeline(p.records, counting, fixtures::planted_rollouts(p.easy), {});
  CHECK(res.report.regex_rejected == 20);
  CHECK(res.report.kept == 20);
  CHECK(counting.calls == 40);  // two per surviving sample
}

TEST_CASE("planted faults are counted exactly and the rerun is idempotent") {
  auto p = fixtures::planted(12, 200, 0.2, 0.1, 0.15);
  PipelineConfig cfg;
  cfg.seed = 5;
  const auto rollouts = fixtures::planted_rollouts(p.easy);
  const auto res = run_pipeline(p.records, *p.judge, rollouts, cfg);
  const auto& rep = res.report;
  CHECK(rep.input_count == 200);
  CHECK(rep.regex_rejected == p.regex);
  CHECK(rep.instr_rejected == p.instr);
  CHECK(rep.bbox_rejected == p.bbox);
  CHECK(rep.difficulty_rejected == p.difficulty);
  CHECK(rep.kept == p.clean);
  CHECK(rep.partition_holds());
  CHECK(rep.trail.size() == 200);
  for (const auto& k : res.kept) {
    CHECK(k.sample.curation.has(CurationFlag::kRegexPass));
    CHECK(k.sample.curation.has(CurationFlag::kInstructionScorePass));
    CHECK(k.sample.curation.has(CurationFlag::kBBoxScorePass));
    CHECK(k.sample.curation.has(CurationFlag::kDifficultyPass));
  }

  const auto again = run_pipeline(res.kept, *p.judge, rollouts, cfg);
  CHECK(again.report.kept == rep.kept);
  CHECK(again.kept.size() == res.kept.size());
  for (std::size_t i = 0; i < again.kept.size(); ++i)
    CHECK(again.kept[i].sample.id == res.kept[i].sample.id);

  cfg.workers = 4;
  const auto parallel = run_pipeline(p.records, *p.judge, rollouts, cfg);
  CHECK(report_to_json(parallel.report) == report_to_json(rep));
}

TEST_CASE("saturated toy policy drops the samples it always solves") {
  auto p = fixtures::planted(13, 120, 0.0, 0.0, 0.0);
  const auto fn = toy_rollout_fn(synth::GridPolicy{Eigen::MatrixXd::Identity(8, 8) * 1e4, 1.0}, 0.0);
  const auto res = run_pipeline(p.records, *p.judge, fn, {});
  int noisy = 0;
  for (const auto& r : p.records) noisy += r.synthetic->annotation_noise;
  CHECK(res.report.partition_holds());
  CHECK(res.report.difficulty_rejected >= 0.9 * (120 - noisy));
  // Mislabelled samples are never solved, so they survive this stage.
  int kept_noisy = 0;
  for (const auto& k : res.kept) kept_noisy += k.synthetic->annotation_noise;
  CHECK(kept_noisy == noisy);
}

TEST_CASE("a fault mid-run aborts with a partial report") {
  auto p = fixtures::planted(14, 50, 0.0, 0.0, 0.0);
  p.records[30].sample.id = "missing-from-transcript";
  PipelineConfig cfg;
  cfg.workers = 3;
  const auto res = run_pipeline(p.records, *p.judge, fixtures::planted_rollouts(p.easy), cfg);
  REQUIRE(res.report.abort_reason);
  CHECK(res.report.abort_reason->find("missing-from-transcript") != std::string::npos);
  CHECK(res.report.unprocessed == 20);
  CHECK(res.report.kept == 30);
  CHECK(res.report.partition_holds());
  CHECK(res.kept.size() == 30);
}

TEST_CASE("transport errors are retried") {
  const std::vector<io::Record> records{plain_record("a", "open the menu")};
  PipelineConfig cfg;
  cfg.max_retries = 2;
  FlakyJudge twice(2);
  auto ok = run_pipeline(records, twice, hits_first(0), cfg);
  CHECK_FALSE(ok.report.abort_reason);
  CHECK(ok.report.kept == 1);

  FlakyJudge thrice(3);
  auto bad = run_pipeline(records, thrice, hits_first(0), cfg);
  REQUIRE(bad.report.abort_reason);
  CHECK(bad.report.unprocessed == 1);
  CHECK(bad.report.partition_holds());

  cfg.max_retries = -1;
  CHECK_THROWS_AS(run_pipeline(records, twice, hits_first(0), cfg), ConfigError);
}

TEST_CASE("report json") {
  auto p = fixtures::planted(15, 10, 0.3, 0.2, 0.0);
  const auto res = run_pipeline(p.records, *p.judge, fixtures::planted_rollouts(p.easy), {});
  const std::string j = report_to_json(res.report);
  CHECK(j.find("\"input_count\": 10") != std::string::npos);
  CHECK(j.find("\"regex_rejected\": 3") != std::string::npos);
  CHECK(j.find("\"abort_reason\": null") != std::string::npos);
}

TEST_CASE("saturated toy policy reproduces planted counts") {
  auto p = fixtures::planted(16, 100, 0.2, 0.1, 0.15, true);
  PipelineConfig cfg;
  cfg.seed = 9;
  const auto fn = toy_rollout_fn(fixtures::saturated_policy(), 0.0);
  const auto res = run_pipeline(p.records, *p.judge, fn, cfg);
  CHECK(res.report.regex_rejected == 20);
  CHECK(res.report.instr_rejected == 5);
  CHECK(res.report.bbox_rejected == 5);
  CHECK(res.report.difficulty_rejected == 15);
  CHECK(res.report.kept == 55);
  const auto again = run_pipeline(res.kept, *p.judge, fn, cfg);
  CHECK(again.report.kept == 55);
}
