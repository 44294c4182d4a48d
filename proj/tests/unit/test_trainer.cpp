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

#include <cmath>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "groundrl/errors.hpp"
#include "groundrl/trainer.hpp"

using namespace groundrl;
using namespace groundrl::train;

namespace {

std::vector<synth::Task> small_tasks(std::uint64_t seed, int n, double sigma = 0.005) {
  auto cfg = synth::StandardDataset::config();
  cfg.sigma = sigma;
  return synth::generate_dataset(seed, n, cfg);
}

TrainConfig quick(int epochs = 3) {
  TrainConfig c;
  c.epochs = epochs;
  c.seed = 3;
  return c;
}

}  // namespace

TEST_CASE("closed gates leave the policy untouched") {
  const auto tasks = small_tasks(1, 60);
  Rng rng(1);
  synth::GridPolicy init{Eigen::MatrixXd::Zero(8, 8), 1.0};
  for (int i = 0; i < 64; ++i) init.theta.data()[i] = rng.normal();
  const auto res = train_stage(init, tasks, std::vector<int>(tasks.size(), 0), quick(), {}, 1);
  CHECK(res.policy.theta == init.theta);
  CHECK(res.record.kept_fraction == 0.0);
  CHECK(res.record.reward_curve.size() == 3);
}

TEST_CASE("a huge KL weight pins the policy") {
  const auto tasks = small_tasks(2, 80);
  const std::vector<int> open(tasks.size(), 1);
  const auto init = synth::GridPolicy::Zero(8);
  auto c = quick(2);
  c.gamma = 0.0;
  const double free_drift = (train_stage(init, tasks, open, c, {}).policy.theta - init.theta).norm();
  c.gamma = 1e6;
  const double pinned = (train_stage(init, tasks, open, c, {}).policy.theta - init.theta).norm();
  REQUIRE(free_drift > 0.0);
  CHECK(pinned < 1e-3 * free_drift);
}

TEST_CASE("training on clean data raises the reward") {
  const auto tasks = small_tasks(3, 200, 0.0);
  const auto split = split_dataset(tasks);
  const auto res = train_stage(synth::GridPolicy::Zero(8), split.train,
                               std::vector<int>(split.train.size(), 1), quick(4), split.eval);
  const auto& rc = res.record.reward_curve;
  REQUIRE(rc.size() == 4);
  CHECK(rc.back() > rc.front());
  CHECK(res.record.eval_curve.back() > evaluate(synth::GridPolicy::Zero(8), split.eval));
  CHECK(res.record.eval_accuracy == evaluate(res.record.policy, split.eval));
  CHECK(res.record.policy.theta == round_to_checkpoint(res.policy).theta);
}

TEST_CASE("gates under the uniform and a trained policy") {
  const auto tasks = small_tasks(4, 100);
  const auto zero = compute_gates(synth::GridPolicy::Zero(8), tasks, 0.2);
  for (int g : zero) CHECK(g == 0);

  const auto split = split_dataset(tasks);
  const auto trained = train_stage(synth::GridPolicy::Zero(8), split.train,
                                   std::vector<int>(split.train.size(), 1), quick(5), {})
                           .policy;
  const auto g = compute_gates(trained, tasks, 0.2);
  int open = 0;
  for (int v : g) open += v;
  CHECK(open > 50);
  CHECK(compute_gates(trained, tasks, 0.2, 4) == g);

  double prev = 1.0;
  for (double tau : {0.05, 0.2, 0.5, 0.8, 0.95}) {
    const auto gt = compute_gates(trained, tasks, tau);
    double frac = 0.0;
    for (int v : gt) frac += v;
    frac /= static_cast<double>(gt.size());
    CHECK(frac <= prev);
    prev = frac;
  }
}

TEST_CASE("evaluate") {
  const auto tasks = small_tasks(5, 30);
  const auto p = synth::GridPolicy::Zero(8);
  const double a = evaluate(p, tasks);
  CHECK(a == evaluate(p, tasks));
  CHECK(a >= 0.0);
  CHECK(a <= 1.0);
  CHECK_THROWS_AS(evaluate(p, {}), DataError);
}

TEST_CASE("held-out split") {
  const auto tasks = small_tasks(7, 500);
  const auto s = split_dataset(tasks);
  CHECK(s.train.size() + s.eval.size() == 500);
  for (const auto& t : s.eval) CHECK(is_held_out(t.sample.id));
  for (const auto& t : s.train) CHECK_FALSE(is_held_out(t.sample.id));
  CHECK(s.eval.size() > 60);
  CHECK(s.eval.size() < 140);
}

TEST_CASE("stage schedule") {
  const auto tasks = small_tasks(8, 150);
  auto c = quick(2);
  c.stages_max = 1;
  auto r = self_evolve(tasks, c);
  CHECK(r.stages.size() == 1);
  CHECK(r.stages[0].kept_fraction == 1.0);

  c.stages_max = 4;
  c.convergence_eps = std::numeric_limits<double>::infinity();
  r = self_evolve(tasks, c);
  CHECK(r.stages.size() == 2);
  CHECK(r.stages[1].stage_index == 2);
  CHECK(r.best_stage >= 1);
  CHECK(r.best_stage <= 2);
  double best = 0.0;
  for (const auto& s : r.stages) best = std::max(best, s.eval_accuracy);
  CHECK(r.stages[r.best_stage - 1].eval_accuracy == best);
}

TEST_CASE("self-evolution is deterministic and worker independent") {
  const auto tasks = small_tasks(9, 150);
  auto c = quick(2);
  c.stages_max = 3;
  c.convergence_eps = -1.0;
  CHECK_THROWS_AS(self_evolve(tasks, c), ConfigError);
  c.convergence_eps = 0.0;
  const auto a = self_evolve(tasks, c);
  c.workers = 3;
  const auto b = self_evolve(tasks, c);
  REQUIRE(a.stages.size() == b.stages.size());
  for (std::size_t i = 0; i < a.stages.size(); ++i) {
    CHECK(a.stages[i].policy.theta == b.stages[i].policy.theta);
    CHECK(a.stages[i].reward_curve == b.stages[i].reward_curve);
    CHECK(a.stages[i].kept_fraction == b.stages[i].kept_fraction);
  }
  CHECK(evolve_json(a, c, {}) == evolve_json(b, c, {}));
}

TEST_CASE("too small a dataset is rejected") {
  CHECK_THROWS_AS(self_evolve(small_tasks(1, 2), quick()), DataError);
}

TEST_CASE("config parsing") {
  std::istringstream in("# comment\ngamma = 0.01\nreward_mode = sparse  # inline\n\ngating = off\nseed=42\n");
  const auto c = parse_config(in, "cfg");
  CHECK(c.gamma == 0.01);
  CHECK(c.reward_mode == reward::Mode::kSparse);
  CHECK_FALSE(c.gating);
  CHECK(c.seed == 42);
  CHECK(c.epochs == 10);

  std::istringstream round(config_to_text(c));
  const auto back = parse_config(round, "round");
  CHECK(config_to_text(back) == config_to_text(c));

  auto bad = [](const char* text) {
    std::istringstream s(text);
    return parse_config(s, "bad");
  };
  CHECK_THROWS_AS(bad("learning_rate = fast\n"), ConfigError);
  CHECK_THROWS_AS(bad("nonsense = 1\n"), ConfigError);
  CHECK_THROWS_AS(bad("gamma 0.1\n"), ConfigError);
  CHECK_THROWS_AS(bad("gamma = 1\ngamma = 2\n"), ConfigError);
  CHECK_THROWS_AS(bad("gamma = nan\n"), ConfigError);
  CHECK_THROWS_AS(bad("epochs = 2.5\n"), ConfigError);
  CHECK_THROWS_AS(load_config_file("/nonexistent/train.cfg"), ConfigError);

  TrainConfig v;
  v.tau = 1.0;
  CHECK_THROWS_AS(v.validate(), ConfigError);
  v = {};
  v.group_size = 1;
  CHECK_THROWS_AS(v.validate(), ConfigError);
}

TEST_CASE("checkpoint round trip") {
  Rng rng(10);
  synth::GridPolicy p{Eigen::MatrixXd(8, 8), 0.5};
  for (int i = 0; i < 64; ++i) p.theta.data()[i] = rng.normal() * 3;
  std::stringstream buf;
  write_checkpoint(buf, p);
  const auto back = read_checkpoint(buf);
  CHECK(back.temperature == 0.5);
  CHECK(back.theta == round_to_checkpoint(p).theta);

  std::stringstream again;
  write_checkpoint(again, back);
  std::stringstream first;
  write_checkpoint(first, p);
  CHECK(again.str() == first.str());

  const std::string bytes = first.str();
  std::stringstream cut(bytes.substr(0, bytes.size() - 1));
  CHECK_THROWS_AS(read_checkpoint(cut), DataError);
  std::stringstream garbage("not a checkpoint\n");
  CHECK_THROWS_AS(read_checkpoint(garbage), DataError);
}

TEST_CASE("epochs to threshold") {
  CHECK(epochs_to_reach({0.1, 0.5, 0.8, 0.9}, 0.8) == 3);
  CHECK_FALSE(epochs_to_reach({0.1, 0.79}, 0.8));
  CHECK_FALSE(epochs_to_reach({}, 0.8));
}

TEST_CASE("artifacts") {
  StageRecord r;
  r.stage_index = 2;
  r.reward_curve = {0.5, 1.25};
  r.eval_curve = {0.25, 0.5};
  const std::string csv = reward_curve_csv({r});
  CHECK(csv.rfind("stage,epoch,mean_reward,eval_accuracy\n", 0) == 0);
  CHECK(csv.find("2,1,") != std::string::npos);
  CHECK(csv.find("2,2,") != std::string::npos);
  r.policy = synth::GridPolicy::Zero(2);
  CHECK(stage_record_json(r, "p.ckpt").find("\"p.ckpt\"") != std::string::npos);
}
