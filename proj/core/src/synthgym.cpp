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

#include "groundrl/synthgym.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "groundrl/errors.hpp"
#include "groundrl/tool_call.hpp"

namespace groundrl::synth {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr const char* kInstructionPrefix = "click the element whose signature is ";

// Frequency bands per axis, in units of pi / (cells along the axis). The
// first band is coarse enough that cos stays monotone across the grid.
constexpr double kBands[][2] = {{0.6, 1.0}, {0.2, 0.5}};

Eigen::MatrixXd clean_features(const SynthConfig& cfg, Rng& rng) {
  const int k = cfg.rows * cfg.cols;
  const int pairs = cfg.feature_dim / 2;
  Eigen::MatrixXd f(k, cfg.feature_dim);
  for (int j = 0; j < pairs; ++j) {
    const bool along_rows = (j % 2) == 0;
    const int extent = along_rows ? cfg.rows : cfg.cols;
    const auto& band = kBands[(j / 2) % 2];
    const double omega = kPi / extent * (band[0] + (band[1] - band[0]) * rng.uniform());
    const double phase = 2.0 * kPi * rng.uniform();
    for (int cell = 0; cell < k; ++cell) {
      const int coord = along_rows ? cell / cfg.cols : cell % cfg.cols;
      f(cell, 2 * j) = std::cos(omega * coord + phase);
      f(cell, 2 * j + 1) = std::sin(omega * coord + phase);
    }
  }
  return f / std::sqrt(static_cast<double>(pairs));
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

void SynthConfig::validate() const {
  if (rows < 1 || cols < 1) throw ConfigError("grid must be at least 1x1");
  if (feature_dim < 2 || feature_dim % 2 != 0) {
    throw ConfigError("feature_dim must be a positive even number");
  }
  if (screen.width < 1 || screen.height < 1) throw ConfigError("screen must be positive");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("sigma must be >= 0");
  if (!(annotation_noise >= 0.0 && annotation_noise <= 1.0)) {
    throw ConfigError("annotation_noise must be in [0, 1]");
  }
}

SynthConfig StandardDataset::config() {
  SynthConfig cfg;
  cfg.sigma = 0.005;
  cfg.annotation_noise = 0.05;
  return cfg;
}

BBox SynthScreen::cell_bbox(int cell) const {
  const double cw = static_cast<double>(screen.width) / cols;
  const double ch = static_cast<double>(screen.height) / rows;
  const int r = cell / cols;
  const int c = cell % cols;
  return BBox{c * cw, r * ch, (c + 1) * cw, (r + 1) * ch};
}

Point SynthScreen::cell_center(int cell) const { return cell_bbox(cell).center(); }

std::vector<Task> generate_dataset(std::uint64_t seed, int count, const SynthConfig& cfg) {
  cfg.validate();
  if (count < 1) throw ConfigError("count must be >= 1");
  std::vector<Task> out;
  out.reserve(count);
  const int k = cfg.rows * cfg.cols;
  for (int i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(i)}));
    const Eigen::MatrixXd clean = clean_features(cfg, rng);
    const int true_cell = static_cast<int>(rng.below(k));

    Task t;
    SynthScreen& s = t.screen;
    s.screen = cfg.screen;
    s.rows = cfg.rows;
    s.cols = cfg.cols;
    s.distractor_noise = cfg.sigma;
    s.instruction = clean.row(true_cell).transpose();
    s.cell_features = clean;
    for (int cell = 0; cell < k; ++cell) {
      for (int d = 0; d < cfg.feature_dim; ++d) {
        s.cell_features(cell, d) += cfg.sigma * rng.normal();
      }
    }
    s.target_cell = true_cell;
    // Always draw, so enabling annotation noise does not shift other streams.
    const double u = rng.uniform();
    const auto offset = k > 1 ? rng.below(k - 1) : 0;
    if (k > 1 && u < cfg.annotation_noise) {
      s.target_cell = static_cast<int>((true_cell + 1 + offset) % k);
      s.annotation_noise = true;
    }

    char id[48];
    std::snprintf(id, sizeof(id), "synth-%llu-%05d", static_cast<unsigned long long>(seed), i);
    t.sample.id = id;
    t.sample.screen = cfg.screen;
    t.sample.source = SyntheticSource{cfg.rows, cfg.cols};
    t.sample.instruction = encode_instruction(s.instruction);
    t.sample.gt_bbox = s.cell_bbox(s.target_cell);
    out.push_back(std::move(t));
  }
  return out;
}

std::string encode_instruction(const Eigen::VectorXd& signature) {
  std::string text = kInstructionPrefix;
  text += '[';
  for (Eigen::Index i = 0; i < signature.size(); ++i) {
    if (i > 0) text += ", ";
    text += format_double(signature(i));
  }
  text += ']';
  return text;
}

Eigen::VectorXd decode_instruction(const std::string& text) {
  const auto open = text.find('[');
  const auto close = text.find(']', open == std::string::npos ? 0 : open);
  if (open == std::string::npos || close == std::string::npos) {
    throw DataError("instruction carries no [signature]");
  }
  std::vector<double> values;
  const char* p = text.data() + open + 1;
  const char* end = text.data() + close;
  while (p < end) {
    while (p < end && (*p == ' ' || *p == ',')) ++p;
    if (p == end) break;
    double v = 0.0;
    const auto res = std::from_chars(p, end, v);
    if (res.ec != std::errc()) throw DataError("bad number in instruction signature");
    values.push_back(v);
    p = res.ptr;
  }
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

io::Record to_record(const Task& task) {
  io::Record rec;
  rec.sample = task.sample;
  io::SyntheticPayload payload;
  const auto& f = task.screen.cell_features;
  payload.feature_dim = static_cast<int>(f.cols());
  payload.features.reserve(f.size());
  for (Eigen::Index r = 0; r < f.rows(); ++r) {
    for (Eigen::Index c = 0; c < f.cols(); ++c) payload.features.push_back(f(r, c));
  }
  payload.annotation_noise = task.screen.annotation_noise;
  rec.synthetic = std::move(payload);
  return rec;
}

Task task_from_record(const io::Record& rec) {
  const auto* syn = std::get_if<SyntheticSource>(&rec.sample.source);
  if (!syn || !rec.synthetic) {
    throw DataError(rec.sample.id + ": not a synthetic record");
  }
  const auto& payload = *rec.synthetic;
  Task t;
  t.sample = rec.sample;
  SynthScreen& s = t.screen;
  s.screen = rec.sample.screen;
  s.rows = syn->rows;
  s.cols = syn->cols;
  s.instruction = decode_instruction(rec.sample.instruction);
  if (s.instruction.size() != payload.feature_dim) {
    throw DataError(rec.sample.id + ": instruction signature length differs from feature_dim");
  }
  s.cell_features.resize(s.num_cells(), payload.feature_dim);
  for (int r = 0; r < s.num_cells(); ++r) {
    for (int c = 0; c < payload.feature_dim; ++c) {
      s.cell_features(r, c) = payload.features[static_cast<std::size_t>(r) * payload.feature_dim + c];
    }
  }
  s.annotation_noise = payload.annotation_noise;

  // The ground-truth box must be exactly one grid cell.
  const Point c = rec.sample.gt_bbox.center();
  const int col = static_cast<int>(c.x * s.cols / s.screen.width);
  const int row = static_cast<int>(c.y * s.rows / s.screen.height);
  s.target_cell = row * s.cols + col;
  if (row < 0 || row >= s.rows || col < 0 || col >= s.cols ||
      !(s.cell_bbox(s.target_cell) == rec.sample.gt_bbox)) {
    throw DataError(rec.sample.id + ": bbox is not a grid cell of the synthetic screen");
  }
  return t;
}

std::vector<Task> tasks_from_records(const std::vector<io::Record>& records) {
  std::vector<Task> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(task_from_record(r));
  return out;
}

GridPolicy GridPolicy::Zero(int feature_dim, double temperature) {
  return GridPolicy{Eigen::MatrixXd::Zero(feature_dim, feature_dim), temperature};
}

Eigen::VectorXd policy_logits(const GridPolicy& policy, const SynthScreen& screen) {
  if (policy.theta.rows() != screen.feature_dim() || policy.theta.cols() != screen.feature_dim() ||
      screen.cell_features.cols() != screen.feature_dim() ||
      screen.cell_features.rows() != screen.num_cells()) {
    throw ConfigError("policy dimensions do not match the screen features");
  }
  const Eigen::VectorXd query = policy.theta.transpose() * screen.instruction;
  return screen.cell_features * query / policy.temperature;
}

Eigen::VectorXd policy_distribution(const GridPolicy& policy, const SynthScreen& screen) {
  const Eigen::VectorXd z = policy_logits(policy, screen);
  const Eigen::VectorXd e = (z.array() - z.maxCoeff()).exp();
  return e / e.sum();
}

int greedy_cell(const GridPolicy& policy, const SynthScreen& screen) {
  const Eigen::VectorXd z = policy_logits(policy, screen);
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < z.size(); ++k) {
    if (z(k) > z(best)) best = k;
  }
  return static_cast<int>(best);
}

Rollout sample_rollout(const Eigen::VectorXd& probs, const Task& task, Rng& rng,
                       double garble_prob) {
  const int cell = rng.categorical(std::span<const double>(probs.data(), probs.size()));
  const bool garble = rng.uniform() < garble_prob;

  Rollout r;
  r.sample_id = task.sample.id;
  r.action_index = cell;
  r.logprob_old = std::log(probs(cell));
  r.logprob_new = r.logprob_old;
  if (garble) {
    r.raw_text = R"(<tool_call>{"name":"computer_use","arguments":{"action":"click"})";
  } else {
    r.raw_text = render_click_point(task.screen.cell_center(cell));
  }
  const ParsedClick parsed = parse_click_point(r.raw_text);
  r.point = parsed.point;
  r.format_valid = parsed.format_valid;
  return r;
}

Rollout sample_rollout(const GridPolicy& policy, const Task& task, Rng& rng, double garble_prob) {
  return sample_rollout(policy_distribution(policy, task.screen), task, rng, garble_prob);
}

}  // namespace groundrl::synth
