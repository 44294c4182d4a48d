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

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <type_traits>

#include "groundrl/byte_order.hpp"
#include "groundrl/errors.hpp"
#include "groundrl/trainer.hpp"
#include "json.hpp"

namespace groundrl::train {
namespace {

using nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("bad value for " + std::string(key) + ": '" + std::string(value) + "'");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (std::isnan(out)) throw ConfigError("bad value for " + std::string(key) + ": NaN");
  }
  return out;
}

bool parse_switch(std::string_view key, std::string_view value) {
  if (value == "on" || value == "true" || value == "1") return true;
  if (value == "off" || value == "false" || value == "0") return false;
  throw ConfigError("bad value for " + std::string(key) + ": expected on|off");
}

std::string fmt(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string_view mode_name(reward::Mode m) {
  return m == reward::Mode::kDense ? "dense" : "sparse";
}

ordered_json config_json(const TrainConfig& c) {
  ordered_json j;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["gamma"] = c.gamma;
  j["tau"] = c.tau;
  j["group_size"] = c.group_size;
  j["epochs"] = c.epochs;
  j["learning_rate"] = c.learning_rate;
  j["stages_max"] = c.stages_max;
  j["convergence_eps"] = c.convergence_eps;
  j["seed"] = c.seed;
  j["reward_mode"] = std::string(mode_name(c.reward_mode));
  j["gating"] = c.gating ? "on" : "off";
  j["temperature"] = c.temperature;
  j["garble_prob"] = c.garble_prob;
  return j;
}

ordered_json stage_json(const StageRecord& r, const std::string& checkpoint_name) {
  ordered_json j;
  j["stage_index"] = r.stage_index;
  j["kept_fraction"] = r.kept_fraction;
  j["reward_curve"] = r.reward_curve;
  j["eval_curve"] = r.eval_curve;
  j["eval_accuracy"] = r.eval_accuracy;
  j["checkpoint"] = checkpoint_name;
  return j;
}

}  // namespace

void set_config_value(TrainConfig& c, std::string_view key, std::string_view value) {
  value = trim(value);
  key = trim(key);
  if (key == "alpha") c.alpha = parse_number<double>(key, value);
  else if (key == "beta") c.beta = parse_number<double>(key, value);
  else if (key == "gamma") c.gamma = parse_number<double>(key, value);
  else if (key == "tau") c.tau = parse_number<double>(key, value);
  else if (key == "group_size") c.group_size = parse_number<int>(key, value);
  else if (key == "epochs") c.epochs = parse_number<int>(key, value);
  else if (key == "learning_rate") c.learning_rate = parse_number<double>(key, value);
  else if (key == "stages_max") c.stages_max = parse_number<int>(key, value);
  else if (key == "convergence_eps") c.convergence_eps = parse_number<double>(key, value);
  else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "temperature") c.temperature = parse_number<double>(key, value);
  else if (key == "garble_prob") c.garble_prob = parse_number<double>(key, value);
  else if (key == "workers") c.workers = parse_number<int>(key, value);
  else if (key == "gating") c.gating = parse_switch(key, value);
  else if (key == "reward_mode") {
    if (value == "dense") c.reward_mode = reward::Mode::kDense;
    else if (value == "sparse") c.reward_mode = reward::Mode::kSparse;
    else throw ConfigError("bad value for reward_mode: expected dense|sparse");
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

TrainConfig parse_config(std::istream& in, std::string_view name, TrainConfig base) {
  std::set<std::string, std::less<>> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view body = line;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = trim(body);
    if (body.empty()) continue;
    const std::string where = std::string(name) + ":" + std::to_string(lineno) + ": ";
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + "expected key = value");
    const std::string key(trim(body.substr(0, eq)));
    if (!seen.insert(key).second) throw ConfigError(where + "repeated key '" + key + "'");
    try {
      set_config_value(base, key, body.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  return base;
}

TrainConfig load_config_file(const std::string& path, TrainConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  return parse_config(in, path, base);
}

std::string config_to_text(const TrainConfig& c) {
  std::ostringstream os;
  const ordered_json j = config_json(c);
  for (const auto& [k, v] : j.items()) {
    os << k << " = " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
  }
  return os.str();
}

std::string stage_record_json(const StageRecord& r, const std::string& checkpoint_name) {
  return stage_json(r, checkpoint_name).dump(2) + "\n";
}

std::string evolve_json(const EvolveResult& r, const TrainConfig& cfg,
                        const std::vector<std::string>& checkpoint_names) {
  ordered_json j;
  j["config"] = config_json(cfg);
  j["train_count"] = r.train_count;
  j["eval_count"] = r.eval_count;
  j["best_stage"] = r.best_stage;
  ordered_json stages = ordered_json::array();
  for (std::size_t i = 0; i < r.stages.size(); ++i) {
    stages.push_back(stage_json(r.stages[i], i < checkpoint_names.size() ? checkpoint_names[i] : ""));
  }
  j["stages"] = std::move(stages);
  return j.dump(2) + "\n";
}

std::string reward_curve_csv(const std::vector<StageRecord>& stages) {
  std::string out = "stage,epoch,mean_reward,eval_accuracy\n";
  for (const auto& s : stages) {
    for (std::size_t e = 0; e < s.reward_curve.size(); ++e) {
      out += std::to_string(s.stage_index) + "," + std::to_string(e + 1) + "," +
             fmt(s.reward_curve[e]) + "," + (e < s.eval_curve.size() ? fmt(s.eval_curve[e]) : "") +
             "\n";
    }
  }
  return out;
}

std::string ablation_table(const std::vector<AblationCell>& cells) {
  std::string out;
  char line[128];
  std::snprintf(line, sizeof(line), "%-8s %-7s %7s %10s %9s\n", "reward", "gating", "stages",
                "ep@0.80", "accuracy");
  out += line;
  for (const auto& c : cells) {
    const std::string ep = c.epochs_to_threshold ? std::to_string(*c.epochs_to_threshold) : "-";
    std::snprintf(line, sizeof(line), "%-8s %-7s %7zu %10s %9.4f\n",
                  std::string(mode_name(c.mode)).c_str(), c.gating ? "on" : "off",
                  c.run.stages.size(), ep.c_str(), c.final_accuracy);
    out += line;
  }
  return out;
}

std::string ablation_json(const std::vector<AblationCell>& cells) {
  ordered_json arr = ordered_json::array();
  for (const auto& c : cells) {
    ordered_json j;
    j["reward_mode"] = std::string(mode_name(c.mode));
    j["gating"] = c.gating ? "on" : "off";
    j["stages"] = c.run.stages.size();
    j["epochs_to_threshold"] =
        c.epochs_to_threshold ? ordered_json(*c.epochs_to_threshold) : ordered_json(nullptr);
    j["final_accuracy"] = c.final_accuracy;
    ordered_json accs = ordered_json::array();
    for (const auto& s : c.run.stages) accs.push_back(s.eval_accuracy);
    j["stage_accuracy"] = std::move(accs);
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

void write_checkpoint(std::ostream& out, const synth::GridPolicy& policy) {
  ordered_json h;
  h["format"] = "groundrl-policy";
  h["version"] = 1;
  h["rows"] = policy.theta.rows();
  h["cols"] = policy.theta.cols();
  h["temperature"] = policy.temperature;
  h["dtype"] = "f32le";
  out << h.dump() << '\n';
  for (Eigen::Index r = 0; r < policy.theta.rows(); ++r) {
    for (Eigen::Index c = 0; c < policy.theta.cols(); ++c) {
      put_f32le(out, static_cast<float>(policy.theta(r, c)));
    }
  }
}

synth::GridPolicy read_checkpoint(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("checkpoint: missing header");
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint: bad header: ") + e.what());
  }
  if (!h.is_object() || h.value("format", "") != "groundrl-policy" || h.value("version", 0) != 1 ||
      h.value("dtype", "") != "f32le" || !h.contains("rows") || !h["rows"].is_number_integer() ||
      !h.contains("cols") || !h["cols"].is_number_integer() || !h.contains("temperature") ||
      !h["temperature"].is_number()) {
    throw DataError("checkpoint: unsupported header");
  }
  const long long rows = h["rows"].get<long long>();
  const long long cols = h["cols"].get<long long>();
  if (rows < 1 || rows != cols || rows > 4096) throw DataError("checkpoint: theta must be square");
  synth::GridPolicy p;
  p.temperature = h["temperature"].get<double>();
  if (!(p.temperature > 0.0)) throw DataError("checkpoint: temperature must be > 0");
  p.theta.resize(rows, cols);
  for (long long r = 0; r < rows; ++r) {
    for (long long c = 0; c < cols; ++c) {
      float v = 0.0f;
      if (!get_f32le(in, v)) throw DataError("checkpoint: truncated parameter block");
      p.theta(r, c) = v;
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) throw DataError("checkpoint: trailing bytes");
  if (!p.theta.allFinite()) throw DataError("checkpoint: non-finite parameters");
  return p;
}

void write_checkpoint_file(const std::string& path, const synth::GridPolicy& policy) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path + " for writing");
  write_checkpoint(out, policy);
  if (!out) throw DataError("write failed: " + path);
}

synth::GridPolicy read_checkpoint_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path);
  return read_checkpoint(in);
}

}  // namespace groundrl::train
