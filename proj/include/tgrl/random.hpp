// Copyright 2026 The tgrl-gridworld Authors. All rights reserved.
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

#ifndef TGRL_RANDOM_HPP
#define TGRL_RANDOM_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace tgrl {

/// The one generator type used everywhere. There is no global instance:
/// every consumer receives an explicitly seeded engine.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Used to decorrelate derived seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// FNV-1a over a stream label.
constexpr std::uint64_t label_hash(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Seed for the `index`-th draw of a named stream rooted at `seed`.
/// Distinct labels give independent streams, e.g. "train" vs "eval".
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view label,
                                    std::uint64_t index = 0) {
  return mix64(mix64(seed ^ label_hash(label)) + index);
}

inline Rng make_rng(std::uint64_t seed, std::string_view label,
                    std::uint64_t index = 0) {
  return Rng(derive_seed(seed, label, index));
}

/// Uniform real in [0, 1). Hand-rolled so results do not depend on the
/// standard library's distribution implementation.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n). Lemire-style rejection keeps it unbiased.
inline int uniform_int(Rng& rng, int n) {
  const auto range = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return static_cast<int>(x % range);
}

/// Index drawn from a discrete distribution given as any indexable
/// container of probabilities summing to one.
template <typename Probs>
int sample_categorical(const Probs& probs, Rng& rng) {
  const int n = static_cast<int>(probs.size());
  double u = uniform01(rng);
  for (int a = 0; a < n - 1; ++a) {
    u -= probs[a];
    if (u < 0.0) return a;
  }
  return n - 1;
}

}  // namespace tgrl

#endif  // TGRL_RANDOM_HPP
