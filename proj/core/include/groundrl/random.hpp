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

#ifndef GROUNDRL_RANDOM_HPP_
#define GROUNDRL_RANDOM_HPP_

#include <cstdint>
#include <initializer_list>
#include <span>

namespace groundrl {

// xoshiro256** seeded through splitmix64. Every draw is specified bit-for-bit
// here (no std:: distributions), so runs reproduce across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Standard normal via Box-Muller; consumes two uniforms per pair.
  double normal();
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  // Index drawn from a discrete distribution by inverse CDF.
  int categorical(std::span<const double> probs);

 private:
  std::uint64_t s_[4];
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

std::uint64_t splitmix64(std::uint64_t& state);

// Mixes a root seed with stream tags (stage, epoch, sample index, ...) into an
// independent stream seed. Parallel workers derive their streams this way so
// results never depend on the worker count.
std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> tags);

// FNV-1a over the bytes of `text`.
std::uint64_t fnv1a64(std::span<const char> text);

}  // namespace groundrl

#endif  // GROUNDRL_RANDOM_HPP_
