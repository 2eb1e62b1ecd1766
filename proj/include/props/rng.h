// Copyright 2026 The PROPS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace props {

// Mixes two 64-bit values into a new seed (splitmix64 finalizer). Used to
// derive independent substreams from a master seed so that consuming draws
// from one stream never shifts another.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag);

// Deterministic random stream. All floating-point draws are produced by
// explicit bit manipulation of the raw 64-bit output, so a given seed yields
// the same sequence on every standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1) with 53-bit resolution. One raw draw.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller. Consumes exactly two raw draws.
  double normal();

  // Uniform integer in [0, bound) without modulo bias.
  std::uint64_t below(std::uint64_t bound);

  // Fisher-Yates shuffle driven by below().
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

  // Independent child stream. Derivation depends only on the parent seed and
  // the tag, never on how many draws the parent has consumed.
  Rng substream(std::uint64_t tag) const { return Rng(mix_seed(seed_, tag)); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

// Stream tags used to keep the pipeline's random consumers independent.
namespace stream_tag {
inline constexpr std::uint64_t kThetaStar = 0x01;
inline constexpr std::uint64_t kWorld = 0x02;
inline constexpr std::uint64_t kHeldoutSplit = 0x03;
inline constexpr std::uint64_t kRandomizedResponse = 0x04;
inline constexpr std::uint64_t kTrainShuffle = 0x05;
inline constexpr std::uint64_t kGradientNoise = 0x06;
}  // namespace stream_tag

}  // namespace props
