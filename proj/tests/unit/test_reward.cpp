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

#include "doctest.h"
#include "groundrl/errors.hpp"
#include "groundrl/random.hpp"
#include "groundrl/reward.hpp"
#include "groundrl/tool_call.hpp"
#include "oracles.hpp"

using namespace groundrl;
using namespace groundrl::reward;

namespace {
const BBox kBox{40, 40, 60, 60};
const ScreenSize kScreen{100, 100};
}  // namespace

TEST_CASE("normalized distance") {
  CHECK(normalized_distance({50, 50}, kBox, kScreen) == 0.0);
  CHECK(normalized_distance({55, 50}, kBox, kScreen) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(normalized_distance({80, 50}, kBox, kScreen) == doctest::Approx(0.30).epsilon(1e-12));
  // Axes are normalized separately.
  CHECK(normalized_distance({100, 0}, {0, 0, 0, 0}, {200, 50}) ==
        doctest::Approx(std::sqrt(0.25)).epsilon(1e-12));
}

TEST_CASE("d_max") {
  CHECK(d_max(kBox, kScreen) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(d_max({0, 0, 0, 0}, kScreen) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(d_max({0, 0, 200, 100}, {200, 100}) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("dense point reward") {
  CHECK(point_reward(Point{50, 50}, kBox, kScreen) == 2.0);
  CHECK(point_reward(Point{55, 50}, kBox, kScreen) == doctest::Approx(1.863580).epsilon(1e-6));
  CHECK(point_reward(Point{80, 50}, kBox, kScreen) == doctest::Approx(0.331480).epsilon(1e-5));
  CHECK(point_reward(std::nullopt, kBox, kScreen) == 0.0);
  // Exact values of the two derived cases.
  const double s = std::sqrt(0.5);
  CHECK(point_reward(Point{55, 50}, kBox, kScreen) ==
        doctest::Approx(1.0 + (1 - 0.05 / s) * (1 - 0.05 / s)).epsilon(1e-13));
  CHECK(point_reward(Point{80, 50}, kBox, kScreen) ==
        doctest::Approx((1 - 0.3 / s) * (1 - 0.3 / s)).epsilon(1e-13));
}

TEST_CASE("sparse, format and combined rewards") {
  CHECK(sparse_point_reward(Point{50, 50}, kBox) == 1.0);
  CHECK(sparse_point_reward(Point{80, 50}, kBox) == 0.0);
  CHECK(sparse_point_reward(std::nullopt, kBox) == 0.0);
  CHECK(format_reward(true) == 1.0);
  CHECK(format_reward(false) == 0.0);
  CHECK(format_reward(parse_click_point(render_click_point({3, 4})).format_valid) == 1.0);
  const RewardConfig cfg;
  CHECK(combined_reward(1, 2.0, cfg) == 5.0);
  CHECK(combined_reward(0, 0, {0.3, 0.7, Mode::kDense}) == 0.0);
  CHECK(combined_reward(1, 0.331480, cfg) == doctest::Approx(1.662960).epsilon(1e-12));
}

TEST_CASE("reward config validation") {
  CHECK_NOTHROW(RewardConfig{}.validate());
  CHECK_THROWS_AS((RewardConfig{0, 0, Mode::kDense}.validate()), ConfigError);
  CHECK_THROWS_AS((RewardConfig{-1, 2, Mode::kDense}.validate()), ConfigError);
}

TEST_CASE("response reward ignores the point of a malformed response") {
  Rollout r;
  r.point = Point{50, 50};
  r.format_valid = false;
  CHECK(response_reward(r, kBox, kScreen, {}) == 0.0);
  r.format_valid = true;
  CHECK(response_reward(r, kBox, kScreen, {}) == 5.0);
  CHECK(response_reward(r, kBox, kScreen, {1, 2, Mode::kSparse}) == 3.0);
}

TEST_CASE("dense reward matches the reference on random inputs") {
  Rng rng(17);
  for (int i = 0; i < 100000; ++i) {
    const int w = 1 + static_cast<int>(rng.below(4000));
    const int h = 1 + static_cast<int>(rng.below(4000));
    double x1 = rng.uniform() * w, x2 = rng.uniform() * w;
    double y1 = rng.uniform() * h, y2 = rng.uniform() * h;
    if (x1 > x2) std::swap(x1, x2);
    if (y1 > y2) std::swap(y1, y2);
    const double px = rng.uniform() * w, py = rng.uniform() * h;
    const double got = point_reward(Point{px, py}, {x1, y1, x2, y2}, {w, h});
    const double want = oracle::point_reward(true, px, py, x1, y1, x2, y2, w, h);
    REQUIRE(std::abs(got - want) <= 1e-12 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("radial monotonicity") {
  Rng rng(23);
  for (int ray = 0; ray < 2000; ++ray) {
    const ScreenSize s{100 + static_cast<int>(rng.below(1900)), 100 + static_cast<int>(rng.below(1900))};
    const double bw = rng.uniform() * s.width * 0.5, bh = rng.uniform() * s.height * 0.5;
    const double x1 = rng.uniform() * (s.width - bw), y1 = rng.uniform() * (s.height - bh);
    const BBox b{x1, y1, x1 + bw, y1 + bh};
    const double angle = rng.uniform() * 2 * M_PI;
    const Point c = b.center();
    double prev = 3.0;
    for (int step = 0; step <= 400; ++step) {
      const double t = step * 0.01 * (s.width + s.height);
      const double r = point_reward(Point{c.x + t * std::cos(angle), c.y + t * std::sin(angle)}, b, s);
      REQUIRE(r <= prev);
      prev = r;
    }
  }
}

TEST_CASE("crossing the box edge drops the reward by one") {
  const ScreenSize s{1920, 1080};
  const BBox b{100, 200, 300, 260};
  for (double eps : {1e-6, 1e-8}) {
    const double in = point_reward(Point{300, 230}, b, s);
    const double out = point_reward(Point{300 + eps, 230}, b, s);
    CHECK(in - out == doctest::Approx(1.0).epsilon(1e-5));
    const double in_y = point_reward(Point{150, 200}, b, s);
    const double out_y = point_reward(Point{150, 200 - eps}, b, s);
    CHECK(in_y - out_y == doctest::Approx(1.0).epsilon(1e-5));
  }
}

TEST_CASE("bounds, scale invariance and sparse implies dense") {
  Rng rng(29);
  for (int i = 0; i < 100000; ++i) {
    const ScreenSize s{1 + static_cast<int>(rng.below(3000)), 1 + static_cast<int>(rng.below(3000))};
    double x1 = rng.uniform() * s.width, x2 = rng.uniform() * s.width;
    double y1 = rng.uniform() * s.height, y2 = rng.uniform() * s.height;
    if (x1 > x2) std::swap(x1, x2);
    if (y1 > y2) std::swap(y1, y2);
    const BBox b{x1, y1, x2, y2};
    // Includes points far off screen.
    const Point p{(rng.uniform() * 5 - 2) * s.width, (rng.uniform() * 5 - 2) * s.height};
    const double r = point_reward(p, b, s);
    REQUIRE(r >= 0.0);
    REQUIRE(r <= 2.0);
    if (sparse_point_reward(p, b) == 1.0) REQUIRE(r >= 1.0);

    const int k = 1 + static_cast<int>(rng.below(7));
    const double scaled = point_reward(Point{p.x * k, p.y * k},
                                       {b.x1 * k, b.y1 * k, b.x2 * k, b.y2 * k},
                                       {s.width * k, s.height * k});
    REQUIRE(scaled == doctest::Approx(r).epsilon(1e-12));
  }
}
