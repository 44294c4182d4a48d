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

// groundrl: synthetic data generation, curation, GRPO training,
// self-evolution, evaluation and attention dumps from one binary.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "groundrl/attention.hpp"
#include "groundrl/attention_io.hpp"
#include "groundrl/curation.hpp"
#include "groundrl/dataset_io.hpp"
#include "groundrl/errors.hpp"
#include "groundrl/evalkit.hpp"
#include "groundrl/synthgym.hpp"
#include "groundrl/trainer.hpp"

namespace fs = std::filesystem;
using namespace groundrl;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw DataError("write failed: " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
}

std::vector<synth::Task> load_tasks(const std::string& path) {
  return synth::tasks_from_records(io::read_records_file(path));
}

// Options shared by train, evolve and ablate.
struct RunOptions {
  std::string data;
  std::string config;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  int workers = 1;

  void attach(CLI::App* app) {
    app->add_option("--data", data, "Synthetic dataset (JSONL)")->required()->check(CLI::ExistingFile);
    app->add_option("--config", config, "key = value run configuration")->check(CLI::ExistingFile);
    app->add_option("--set", overrides, "Override one config key (key=value), repeatable");
    app->add_option("--seed", seed, "Run seed (overrides the config file)");
    app->add_option("--workers", workers, "Parallel rollout/gate workers")->check(CLI::PositiveNumber);
  }

  train::TrainConfig resolve() const {
    train::TrainConfig cfg;
    if (!config.empty()) cfg = train::load_config_file(config);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
      train::set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed) cfg.seed = *seed;
    cfg.workers = workers;
    cfg.validate();
    return cfg;
  }
};

// ---- gen -----------------------------------------------------------------

struct GenOptions {
  std::uint64_t seed = synth::StandardDataset::kSeed;
  int count = synth::StandardDataset::kCount;
  synth::SynthConfig synth = synth::StandardDataset::config();
  std::string out;
};

int run_gen(const GenOptions& o) {
  o.synth.validate();
  const auto tasks = synth::generate_dataset(o.seed, o.count, o.synth);
  std::vector<io::Record> records;
  records.reserve(tasks.size());
  for (const auto& t : tasks) records.push_back(synth::to_record(t));
  io::write_records_file(o.out, records);
  std::cout << "wrote " << records.size() << " samples to " << o.out << "\n";
  return 0;
}

// ---- curate --------------------------------------------------------------

struct CurateOptions {
  std::string in;
  std::string out;
  std::string report;
  std::string judge_url;
  std::string judge_model;
  std::string replay;
  std::string patterns;
  std::string policy;
  std::uint64_t seed = 0;
  int workers = 1;
  int k = 8;
  int retries = 2;
  double garble_prob = 0.0;
};

int run_curate(const CurateOptions& o) {
  if (o.judge_url.empty() == o.replay.empty()) {
    throw ConfigError("give exactly one of --judge-url or --replay");
  }
  curation::PipelineConfig cfg;
  if (!o.patterns.empty()) cfg.patterns = curation::PatternSet::FromFile(o.patterns);
  cfg.difficulty_k = o.k;
  cfg.seed = o.seed;
  cfg.workers = o.workers;
  cfg.max_retries = o.retries;

  std::unique_ptr<curation::ExternalJudge> judge;
  if (!o.replay.empty()) {
    judge = std::make_unique<curation::ReplayJudge>(curation::ReplayJudge::FromFile(o.replay));
  } else {
    if (o.judge_model.empty()) throw ConfigError("--judge-url needs --judge-model");
    judge = std::make_unique<curation::HttpJudge>(curation::HttpJudgeConfig{o.judge_url, o.judge_model});
  }

  const auto records = io::read_records_file(o.in);
  synth::GridPolicy policy;
  if (!o.policy.empty()) {
    policy = train::read_checkpoint_file(o.policy);
  } else {
    int f = 0;
    for (const auto& r : records) {
      if (r.synthetic) {
        f = r.synthetic->feature_dim;
        break;
      }
    }
    policy = synth::GridPolicy::Zero(std::max(f, 1));
  }
  const auto result =
      run_pipeline(records, *judge, curation::toy_rollout_fn(policy, o.garble_prob), cfg);

  const std::string report_path = o.report.empty() ? o.out + ".report.json" : o.report;
  write_text(report_path, curation::report_to_json(result.report));
  if (result.report.abort_reason) {
    throw DataError("curation aborted (" + std::to_string(result.report.unprocessed) +
                    " unprocessed, partial report in " + report_path +
                    "): " + *result.report.abort_reason);
  }
  io::write_records_file(o.out, result.kept);
  const auto& r = result.report;
  std::cout << "input " << r.input_count << ", regex " << r.regex_rejected << ", instruction "
            << r.instr_rejected << ", bbox " << r.bbox_rejected << ", difficulty "
            << r.difficulty_rejected << ", kept " << r.kept << "\n";
  return 0;
}

// ---- train / evolve ------------------------------------------------------

int run_train(const RunOptions& o, const std::string& out_dir) {
  const auto cfg = o.resolve();
  const auto split = train::split_dataset(load_tasks(o.data));
  if (split.train.empty() || split.eval.empty()) throw DataError("dataset too small for the 80/20 split");
  const int f = split.train.front().screen.feature_dim();
  const std::vector<int> gates(split.train.size(), 1);
  const auto result = train::train_stage(synth::GridPolicy::Zero(f, cfg.temperature), split.train,
                                         gates, cfg, split.eval, 1);
  ensure_dir(out_dir);
  const fs::path dir(out_dir);
  train::write_checkpoint_file((dir / "policy.ckpt").string(), result.record.policy);
  write_text(dir / "stage_record.json", train::stage_record_json(result.record, "policy.ckpt"));
  write_text(dir / "reward_curve.csv", train::reward_curve_csv({result.record}));
  std::printf("stage 1: eval accuracy %.4f\n", result.record.eval_accuracy);
  return 0;
}

int run_evolve(const RunOptions& o, const std::string& out_dir) {
  const auto cfg = o.resolve();
  const auto result = train::self_evolve(load_tasks(o.data), cfg);
  ensure_dir(out_dir);
  const fs::path dir(out_dir);
  std::vector<std::string> names;
  for (const auto& s : result.stages) {
    names.push_back("stage_" + std::to_string(s.stage_index) + ".ckpt");
    train::write_checkpoint_file((dir / names.back()).string(), s.policy);
  }
  train::write_checkpoint_file((dir / "final.ckpt").string(), result.stages.back().policy);
  write_text(dir / "evolve.json", train::evolve_json(result, cfg, names));
  write_text(dir / "reward_curve.csv", train::reward_curve_csv(result.stages));
  for (const auto& s : result.stages) {
    std::printf("stage %d: kept %.4f, eval accuracy %.4f\n", s.stage_index, s.kept_fraction,
                s.eval_accuracy);
  }
  return 0;
}

// ---- eval ----------------------------------------------------------------

struct EvalOptions {
  std::string data;
  std::string checkpoint;
  std::string predictions;
  std::string split = "heldout";
  std::string json_out;
};

int run_eval(const EvalOptions& o) {
  if (o.checkpoint.empty() == o.predictions.empty()) {
    throw ConfigError("give exactly one of --checkpoint or --predictions");
  }
  if (!o.predictions.empty()) {
    const auto records = eval::load_benchmark(o.data);
    const auto report = eval::score_predictions(records, eval::read_predictions_file(o.predictions));
    if (!o.json_out.empty()) write_text(o.json_out, eval::report_json(report));
    std::cout << eval::report_table(report);
    return 0;
  }
  const auto policy = train::read_checkpoint_file(o.checkpoint);
  auto tasks = load_tasks(o.data);
  if (o.split != "all") {
    auto split = train::split_dataset(tasks);
    tasks = o.split == "heldout" ? std::move(split.eval) : std::move(split.train);
  }
  const double acc = train::evaluate(policy, tasks);
  if (!o.json_out.empty()) {
    std::ostringstream js;
    js << "{\"split\": \"" << o.split << "\", \"count\": " << tasks.size() << ", \"accuracy\": ";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", acc);
    js << buf << "}\n";
    write_text(o.json_out, js.str());
  }
  std::printf("accuracy %.17g (%zu samples, split %s)\n", acc, tasks.size(), o.split.c_str());
  return 0;
}

// ---- attn ----------------------------------------------------------------

struct AttnOptions {
  std::string data;
  std::string checkpoint;
  std::string sample_id;
  std::string out;
  std::string ppm;
  double tau = 0.2;
};

int run_attn(const AttnOptions& o) {
  const auto policy = train::read_checkpoint_file(o.checkpoint);
  const auto tasks = load_tasks(o.data);
  const synth::Task* task = nullptr;
  for (const auto& t : tasks) {
    if (t.sample.id == o.sample_id) {
      task = &t;
      break;
    }
  }
  if (!task) throw DataError("sample id not found: " + o.sample_id);
  const auto map = attention::toy_attention(policy, *task);
  attention::write_map_file(o.out, map);
  const std::string ppm = o.ppm.empty() ? o.out + ".ppm" : o.ppm;
  attention::write_heatmap_ppm_file(ppm, map);
  const auto& b = task->sample.gt_bbox;
  std::printf("p_peak %d, p_global %d, gate %d\n", attention::p_peak(map, b, o.tau),
              attention::p_global(map, b), attention::gate(map, b, o.tau));
  return 0;
}

// ---- ablate --------------------------------------------------------------

int run_ablate(const RunOptions& o, const std::string& out) {
  const auto cfg = o.resolve();
  const auto cells = train::run_ablation(load_tasks(o.data), cfg);
  if (!out.empty()) write_text(out, train::ablation_json(cells));
  std::cout << train::ablation_table(cells);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"groundrl: dense-reward GRPO with attention-gated self-evolution"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "groundrl 0.1.0");

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Write a synthetic grounding dataset");
  gen_cmd->add_option("--seed", gen.seed, "Dataset seed");
  gen_cmd->add_option("--count", gen.count, "Number of samples")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--rows", gen.synth.rows, "Grid rows");
  gen_cmd->add_option("--cols", gen.synth.cols, "Grid columns");
  gen_cmd->add_option("--features", gen.synth.feature_dim, "Feature dimension (even)");
  gen_cmd->add_option("--width", gen.synth.screen.width, "Screen width (pixels)");
  gen_cmd->add_option("--height", gen.synth.screen.height, "Screen height (pixels)");
  gen_cmd->add_option("--sigma", gen.synth.sigma, "Feature noise standard deviation");
  gen_cmd->add_option("--annotation-noise", gen.synth.annotation_noise,
                      "Probability of a mislabeled ground-truth box");
  gen_cmd->add_option("--out", gen.out, "Output JSONL")->required();

  CurateOptions cur;
  auto* cur_cmd = app.add_subcommand("curate", "Filter a dataset: regex, judges, difficulty");
  cur_cmd->add_option("--in", cur.in, "Input JSONL")->required()->check(CLI::ExistingFile);
  cur_cmd->add_option("--out", cur.out, "Kept samples (JSONL)")->required();
  cur_cmd->add_option("--report", cur.report, "Report path (default <out>.report.json)");
  cur_cmd->add_option("--judge-url", cur.judge_url, "Chat-completions endpoint");
  cur_cmd->add_option("--judge-model", cur.judge_model, "Model name sent to the judge");
  cur_cmd->add_option("--replay", cur.replay, "Judge transcript (JSONL)")->check(CLI::ExistingFile);
  cur_cmd->add_option("--patterns", cur.patterns, "Regex file, one pattern per line")
      ->check(CLI::ExistingFile);
  cur_cmd->add_option("--policy", cur.policy, "Checkpoint for difficulty rollouts (default theta=0)")
      ->check(CLI::ExistingFile);
  cur_cmd->add_option("--seed", cur.seed, "Difficulty rollout seed");
  cur_cmd->add_option("--workers", cur.workers, "Concurrent samples")->check(CLI::PositiveNumber);
  cur_cmd->add_option("--k", cur.k, "Difficulty rollouts per sample")->check(CLI::PositiveNumber);
  cur_cmd->add_option("--retries", cur.retries, "Retries per judge call on transport errors")
      ->check(CLI::NonNegativeNumber);
  cur_cmd->add_option("--garble-prob", cur.garble_prob, "Malformed-response rate of the rollouts")
      ->check(CLI::Range(0.0, 1.0));

  RunOptions train_opts;
  std::string train_out;
  auto* train_cmd = app.add_subcommand("train", "Single GRPO stage");
  train_opts.attach(train_cmd);
  train_cmd->add_option("--out-dir", train_out, "Output directory")->required();

  RunOptions evo_opts;
  std::string evo_out;
  auto* evo_cmd = app.add_subcommand("evolve", "Full self-evolution run");
  evo_opts.attach(evo_cmd);
  evo_cmd->add_option("--out-dir", evo_out, "Output directory")->required();

  EvalOptions ev;
  auto* eval_cmd = app.add_subcommand("eval", "Accuracy of a checkpoint or a prediction file");
  eval_cmd->add_option("--data", ev.data, "Dataset or benchmark JSONL")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--checkpoint", ev.checkpoint, "Toy policy checkpoint")->check(CLI::ExistingFile);
  eval_cmd->add_option("--predictions", ev.predictions, "Predictions JSONL")->check(CLI::ExistingFile);
  eval_cmd->add_option("--split", ev.split, "Checkpoint evaluation split")
      ->check(CLI::IsMember({"heldout", "train", "all"}));
  eval_cmd->add_option("--json", ev.json_out, "Also write the report as JSON");

  AttnOptions at;
  auto* attn_cmd = app.add_subcommand("attn", "Dump a toy attention map for one sample");
  attn_cmd->add_option("--data", at.data, "Synthetic dataset")->required()->check(CLI::ExistingFile);
  attn_cmd->add_option("--checkpoint", at.checkpoint, "Policy checkpoint")->required()->check(CLI::ExistingFile);
  attn_cmd->add_option("--sample-id", at.sample_id, "Sample id")->required();
  attn_cmd->add_option("--out", at.out, "Attention map file")->required();
  attn_cmd->add_option("--ppm", at.ppm, "Heatmap path (default <out>.ppm)");
  attn_cmd->add_option("--tau", at.tau, "Gate threshold for the printed predicates")
      ->check(CLI::Range(0.0, 1.0));

  RunOptions abl_opts;
  std::string abl_out;
  auto* abl_cmd = app.add_subcommand("ablate", "Dense/sparse x gating on/off comparison");
  abl_opts.attach(abl_cmd);
  abl_cmd->add_option("--out", abl_out, "Also write the table as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen_cmd) return run_gen(gen);
    if (*cur_cmd) return run_curate(cur);
    if (*train_cmd) return run_train(train_opts, train_out);
    if (*evo_cmd) return run_evolve(evo_opts, evo_out);
    if (*eval_cmd) return run_eval(ev);
    if (*attn_cmd) return run_attn(at);
    if (*abl_cmd) return run_ablate(abl_opts, abl_out);
  } catch (const ConfigError& e) {
    std::cerr << "groundrl: error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "groundrl: error: " << e.what() << "\n";
    return kExitData;
  } catch (const TransportError& e) {
    std::cerr << "groundrl: error: " << e.what() << "\n";
    return kExitData;
  } catch (const NumericError& e) {
    std::cerr << "groundrl: error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "groundrl: error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
